// acceptance --criterion N [--cli PATH]
// One line per claim; exit status 1 when any claim fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "verify.hpp"

namespace fs = std::filesystem;
using namespace radial::verify;

namespace {

std::string upper(Verdict v) {
    std::string s = to_string(v);
    for (char& c : s) c = static_cast<char>(std::toupper(c));
    return s;
}

void print(int criterion, const std::string& anchor, Verdict v, const std::string& text) {
    std::printf("%-8s criterion %2d  %-52s %s\n", upper(v).c_str(), criterion, anchor.c_str(), text.c_str());
    std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// verify-all twice, once threaded, and compare the summaries byte for byte
int determinism(const std::string& cli, std::uint64_t seed) {
    const fs::path root = fs::temp_directory_path() / ("radial-acceptance-" + std::to_string(seed));
    fs::remove_all(root);
    double seconds[2];
    const int threads[2] = {1, 4};
    for (int k = 0; k < 2; ++k) {
        const fs::path out = root / ("run" + std::to_string(k));
        const std::string cmd = "\"" + cli + "\" verify-all --seed " + std::to_string(seed) + " --threads " +
                                std::to_string(threads[k]) + " --out \"" + out.string() + "\" > \"" +
                                (root / ("log" + std::to_string(k))).string() + "\" 2>&1";
        fs::create_directories(root);
        auto t0 = std::chrono::steady_clock::now();
        int rc = std::system(cmd.c_str());
        seconds[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (rc != 0) {
            print(13, "verify-all/completes", Verdict::fail, "exit status " + std::to_string(rc) + ", see " + root.string());
            return 1;
        }
    }
    const std::string a = slurp(root / "run0" / "summary.json"), b = slurp(root / "run1" / "summary.json");
    bool ok = true;
    auto line = [&](const std::string& anchor, bool pass, const std::string& text) {
        print(13, anchor, pass ? Verdict::pass : Verdict::fail, text);
        ok = ok && pass;
    };
    line("verify-all/bit-identical-summary", !a.empty() && a == b,
         "summary.json identical for --threads 1 and --threads 4 (" + std::to_string(a.size()) + " bytes)");
    std::size_t claims = 0;
    try {
        claims = nlohmann::json::parse(a).at("claims").size();
    } catch (const std::exception&) {
    }
    line("verify-all/claim-count", claims >= 20, std::to_string(claims) + " claim verdicts (>= 20)");
    for (int k = 0; k < 2; ++k) {
        std::ostringstream t;
        t.precision(4);
        t << seconds[k] << " s with --threads " << threads[k] << " (< 900 s)";
        line("verify-all/wall-time", seconds[k] < 900, t.str());
    }
    if (ok) fs::remove_all(root);
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int criterion = 0;
    std::string cli;
    std::uint64_t seed = Options{}.seed;
    app.add_option("--criterion", criterion, "criterion number, 1..13")->required()->check(CLI::Range(1, 13));
    app.add_option("--cli", cli, "path of the radial executable (criterion 13)");
    app.add_option("--seed", seed, "seed for the randomized suites");
    CLI11_PARSE(app, argc, argv);

    if (criterion == 13) {
        if (cli.empty()) {
            std::cerr << "criterion 13 needs --cli\n";
            return 2;
        }
        return determinism(cli, seed);
    }
    Options opt;
    opt.seed = seed;
    bool ok = true;
    for (const Claim& c : run_criterion(criterion, opt)) {
        std::ostringstream t;
        t.precision(6);
        t << c.statement << ": " << c.value;
        if (!c.bound.empty()) t << " (" << c.bound << ")";
        if (!c.note.empty()) t << " [" << c.note << "]";
        print(c.criterion, c.anchor, c.verdict, t.str());
        ok = ok && c.verdict != Verdict::fail;
    }
    return ok ? 0 : 1;
}
