// optdisc: command-line front end.
//
// Exit codes: 0 success, 1 NO from decide (or a brute-force bound exceeded),
// 2 failed verification, 64 usage error, 65 malformed input, 70 internal
// failure (for example an exhaustive family above its cap).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "optdisc/errors.hpp"
#include "optdisc/geometry.hpp"
#include "optdisc/oracle.hpp"
#include "optdisc/pipeline.hpp"

using namespace optdisc;
namespace fs = std::filesystem;

namespace {

constexpr int kUsage = 64;
constexpr int kDataErr = 65;
constexpr int kSoftware = 70;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RawInstance load_instance(const std::string& path) {
    try {
        return read_instance_file(path);
    } catch (const ParseError& e) {
        throw InputError(path + ": " + e.what());
    } catch (const OverlapError& e) {
        throw InputError(path + ": " + e.what());
    }
}

Normalized load_normalized(const std::string& path) {
    auto raw = load_instance(path);
    try {
        return normalize(raw);
    } catch (const OverlapError& e) {
        throw InputError(path + ": " + e.what());
    }
}

RawSeparation load_separation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_separation_json(ss.str());
    } catch (const ParseError& e) {
        throw InputError(path + ": " + e.what());
    }
}

struct ModeFlags {
    std::string mode = "exhaustive";
    std::uint64_t seed = 1;
    int trials = 0;
    int jobs = 1;

    void attach(CLI::App* app) {
        app->add_option("--mode", mode, "color coding: exhaustive or rand")
            ->check(CLI::IsMember({"exhaustive", "rand"}));
        app->add_option("--seed", seed, "seed of the randomized color coding");
        app->add_option("--trials", trials, "randomized trials per branch (0: default)");
        app->add_option("--jobs", jobs, "threads for the branch fan-out")->check(CLI::PositiveNumber);
    }
    SolveOptions options() const {
        SolveOptions o;
        o.reduction.mode = mode == "rand" ? ColorMode::Randomized : ColorMode::Exhaustive;
        o.reduction.seed = seed;
        o.reduction.trials = trials;
        o.jobs = jobs;
        return o;
    }
};

std::string point_str(const RawPoint& p) {
    return "(" + format_rational(p.x) + ", " + format_rational(p.y) + ")";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

// Instance bounding box mapped to [50, 950] in both directions, y up.
std::string render_svg(const RawInstance& inst, const RawSeparation* sep) {
    std::vector<double> xs, ys;
    for (const auto* w : {&inst.w1, &inst.w2})
        for (const auto& p : *w) xs.push_back(p.x.convert_to<double>()), ys.push_back(p.y.convert_to<double>());
    if (sep)
        for (const auto& v : sep->xs) xs.push_back(v.convert_to<double>());
    if (sep)
        for (const auto& v : sep->ys) ys.push_back(v.convert_to<double>());
    auto range = [](const std::vector<double>& v) {
        if (v.empty()) return std::pair{0.0, 1.0};
        auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *lo == *hi ? std::pair{*lo - 1, *hi + 1} : std::pair{*lo, *hi};
    };
    const auto [x0, x1] = range(xs);
    const auto [y0, y1] = range(ys);
    auto sx = [&](double x) { return 50 + 900 * (x - x0) / (x1 - x0); };
    auto sy = [&](double y) { return 950 - 900 * (y - y0) / (y1 - y0); };
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n";
    if (sep) {
        for (const auto& v : sep->xs)
            o << "<line x1=\"" << sx(v.convert_to<double>()) << "\" y1=\"0\" x2=\"" << sx(v.convert_to<double>())
              << "\" y2=\"1000\" stroke=\"black\" stroke-width=\"2\"/>\n";
        for (const auto& v : sep->ys)
            o << "<line x1=\"0\" y1=\"" << sy(v.convert_to<double>()) << "\" x2=\"1000\" y2=\""
              << sy(v.convert_to<double>()) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    }
    for (const auto& p : inst.w1)
        o << "<circle cx=\"" << sx(p.x.convert_to<double>()) << "\" cy=\"" << sy(p.y.convert_to<double>())
          << "\" r=\"8\" fill=\"#d62728\"/>\n";
    for (const auto& p : inst.w2)
        o << "<circle cx=\"" << sx(p.x.convert_to<double>()) << "\" cy=\"" << sy(p.y.convert_to<double>())
          << "\" r=\"8\" fill=\"#1f77b4\"/>\n";
    o << "</svg>\n";
    return o.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact minimum axis-parallel line separation of two point sets"};
    app.require_subcommand(1);

    std::string file, sep_file, out_file, corpus;
    int k = 0;
    std::optional<int> bound;
    ModeFlags solve_flags, decide_flags, bench_flags;
    std::uint64_t gen_seed = 1;
    int kx = 1, ky = 1, ppc = 2;

    auto* solve_cmd = app.add_subcommand("solve", "print a minimum separation as JSON");
    solve_cmd->add_option("file", file, "instance file")->required();
    solve_flags.attach(solve_cmd);

    auto* decide_cmd = app.add_subcommand("decide", "YES and a separation with at most k lines, or NO");
    decide_cmd->add_option("file", file, "instance file")->required();
    decide_cmd->add_option("-k", k, "line budget")->required()->check(CLI::NonNegativeNumber);
    decide_flags.attach(decide_cmd);

    auto* brute_cmd = app.add_subcommand("brute", "brute-force minimum separation");
    brute_cmd->add_option("file", file, "instance file")->required();
    brute_cmd->add_option("--bound", bound, "give up above this size");

    auto* verify_cmd = app.add_subcommand("verify", "check a separation");
    verify_cmd->add_option("file", file, "instance file")->required();
    verify_cmd->add_option("--sep", sep_file, "separation file")->required();

    auto* gen_cmd = app.add_subcommand("gen", "planted random instance");
    gen_cmd->add_option("--seed", gen_seed);
    gen_cmd->add_option("--kx", kx)->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--ky", ky)->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--ppc", ppc, "points per planted cell")->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("-o", out_file, "output file")->required();

    auto* render_cmd = app.add_subcommand("render", "SVG picture of an instance");
    render_cmd->add_option("file", file, "instance file")->required();
    render_cmd->add_option("--sep", sep_file, "separation file");
    render_cmd->add_option("-o", out_file, "output SVG")->required();

    auto* bench_cmd = app.add_subcommand("bench", "CSV timings over a directory of instances");
    bench_cmd->add_option("--corpus", corpus, "directory")->required()->check(CLI::ExistingDirectory);
    bench_flags.attach(bench_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*solve_cmd) {
            auto nm = load_normalized(file);
            auto sep = solve_min(nm.inst, solve_flags.options());
            std::cout << separation_to_json(denormalize_separation(sep, nm.maps)) << '\n';
            return 0;
        }
        if (*decide_cmd) {
            auto nm = load_normalized(file);
            auto sep = decide(nm.inst, k, decide_flags.options());
            if (!sep) {
                std::cout << "NO\n";
                return 1;
            }
            std::cout << "YES\n" << separation_to_json(denormalize_separation(*sep, nm.maps)) << '\n';
            return 0;
        }
        if (*brute_cmd) {
            auto nm = load_normalized(file);
            try {
                auto sep = min_separation_bruteforce(nm.inst, bound);
                std::cout << separation_to_json(denormalize_separation(sep, nm.maps)) << '\n';
            } catch (const BoundExceeded&) {
                std::cout << "optimum exceeds " << *bound << '\n';
                return 1;
            }
            return 0;
        }
        if (*verify_cmd) {
            auto raw = load_instance(file);
            auto sep = load_separation(sep_file);
            auto v = verify_separation(raw, sep);
            if (v.ok) {
                std::cout << "OK\n";
                return 0;
            }
            std::cout << "VIOLATION " << point_str(v.violation->first) << " " << point_str(v.violation->second)
                      << '\n';
            return 2;
        }
        if (*gen_cmd) {
            write_text(out_file, instance_to_json(generate_planted(gen_seed, kx, ky, ppc)) + "\n");
            return 0;
        }
        if (*render_cmd) {
            auto raw = load_instance(file);
            std::optional<RawSeparation> sep;
            if (!sep_file.empty()) sep = load_separation(sep_file);
            write_text(out_file, render_svg(raw, sep ? &*sep : nullptr));
            return 0;
        }
        if (*bench_cmd) {
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(corpus))
                if (e.is_regular_file()) files.push_back(e.path());
            std::sort(files.begin(), files.end());
            std::cout << "instance,n,optimum,brute_s,exhaustive_s,rand_s\n";
            for (const auto& f : files) {
                auto nm = load_normalized(f.string());
                auto t0 = std::chrono::steady_clock::now();
                const int opt = min_separation_bruteforce(nm.inst).size();
                const double tb = seconds_since(t0);
                auto o = bench_flags.options();
                o.reduction.mode = ColorMode::Exhaustive;
                t0 = std::chrono::steady_clock::now();
                solve_min(nm.inst, o);
                const double te = seconds_since(t0);
                o.reduction.mode = ColorMode::Randomized;
                t0 = std::chrono::steady_clock::now();
                solve_min(nm.inst, o);
                const double tr = seconds_since(t0);
                std::cout << f.filename().string() << ',' << nm.inst.n() << ',' << opt << ',' << tb << ',' << te
                          << ',' << tr << '\n';
            }
            return 0;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataErr;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSoftware;
    }
    return kUsage;
}
