// Batch entry point: parses a flat key-value config, dispatches verification
// suites and torsion/anomaly computations, and emits reports.
//
// Exit codes: 0 all cases pass, 1 suite failure, 2 config/usage error,
// 3 internal error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cmtorsion/report.hpp"
#include "cmtorsion/suites.hpp"

namespace {

struct RunConfig {
    cmt::TorusConfig model;
    bool have_model = false;
    bool timings = false;
    uint64_t seed = 1;
    std::string out;
    std::string format = "text";
    cmt::suites::Tol tol;
};

// Flat key-value grammar: one `key = value` per line, `#` comments.
// Keys: factors (int, default 1); per factor k (1-based, suffix .k, suffix
// optional when factors = 1): tau_re.k, tau_im.k, scale.k, alpha.k, beta.k,
// alpha_im.k, beta_im.k (non-unitary twists); global: p, timings.
// Unknown keys are rejected.
void parse_config_file(const std::string& path, RunConfig& rc) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = true;
            for (char c : line)
                if (!isspace((unsigned char)c)) blank = false;
            if (blank) continue;
            throw std::invalid_argument("config: parse error at line " + std::to_string(lineno));
        }
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::invalid_argument("config: empty key or value at line " + std::to_string(lineno));
        if (kv.count(key)) throw std::invalid_argument("config: duplicate key " + key);
        kv[key] = val;
    }

    auto take = [&](const std::string& key, double fallback, bool* present = nullptr) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (present) *present = false;
            return fallback;
        }
        if (present) *present = true;
        double v = std::stod(it->second);
        kv.erase(it);
        return v;
    };

    int factors = int(take("factors", 1));
    if (factors < 1 || factors > 4) throw std::invalid_argument("config: factors out of range");
    cmt::TorusConfig model;
    for (int k = 1; k <= factors; ++k) {
        std::string sfx = (factors == 1 && kv.count("tau_im")) ? "" : "." + std::to_string(k);
        cmt::TorusFactor f;
        f.tau = {take("tau_re" + sfx, 0.0), take("tau_im" + sfx, 1.0)};
        f.scale = take("scale" + sfx, 1.0);
        f.alpha = {take("alpha" + sfx, 0.5), take("alpha_im" + sfx, 0.0)};
        f.beta = {take("beta" + sfx, 0.0), take("beta_im" + sfx, 0.0)};
        model.factors.push_back(f);
    }
    model.p = int(take("p", 0));
    rc.timings = take("timings", 0.0) != 0.0;
    if (!kv.empty()) throw std::invalid_argument("config: unknown key " + kv.begin()->first);
    model.validate();
    rc.model = model;
    rc.have_model = true;
}

void parse_tols(const std::vector<std::string>& tols, cmt::suites::Tol& out) {
    for (const auto& s : tols) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--tol expects NAME=VALUE");
        double v = std::stod(s.substr(eq + 1));
        if (!(v > 0)) throw std::invalid_argument("--tol values must be positive");
        out[s.substr(0, eq)] = v;
    }
}

int finish(const cmt::Report& rep_in, const RunConfig& rc) {
    cmt::Report rep = rep_in;
    if (!rc.timings) rep.wall_time = 0.0; // deterministic output by default
    std::string payload = cmt::emit(rep, rc.format);
    if (rc.out.empty())
        std::cout << payload;
    else
        cmt::write_atomic(rc.out, payload);
    return rep.all_pass() ? 0 : 1;
}

cmt::TorusConfig default_model() {
    cmt::TorusFactor f;
    f.tau = {0.0, 1.0};
    f.scale = 1.0;
    f.alpha = 0.5;
    f.beta = 0.0;
    cmt::TorusConfig c;
    c.factors = {f};
    c.p = 0;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cmtorsion: verification toolkit for holomorphic torsion on flat tori"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "text";
    uint64_t seed = 1;
    std::vector<std::string> tols;
    app.add_option("--config", config_path, "flat key-value model config");
    app.add_option("--seed", seed, "seed for randomized property cases");
    app.add_option("--out", out_path, "output path (atomic write)");
    app.add_option("--format", format, "json, csv, or text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--tol", tols, "per-suite tolerance override NAME=VALUE (repeatable)");

    auto* c_alg = app.add_subcommand("verify-algebra", "graded algebra battery");
    auto* c_cw = app.add_subcommand("verify-chern-weil", "characteristic form battery");
    auto* c_me = app.add_subcommand("verify-mehler", "oscillator kernel battery");
    auto* c_pa = app.add_subcommand("verify-parametrix", "parametrix battery");
    auto* c_to = app.add_subcommand("torsion", "zeta-regularized torsion of the model");
    auto* c_an = app.add_subcommand("anomaly", "anomaly check between two metric scales");
    auto* c_re = app.add_subcommand("report", "run everything");
    double scale0 = 1.0, scale1 = 2.0;
    c_an->add_option("--scale0", scale0, "first metric scale");
    c_an->add_option("--scale1", scale1, "second metric scale");
    for (auto* sc : {c_alg, c_cw, c_me, c_pa, c_to, c_an, c_re}) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage problems exit 2
    }

    RunConfig rc;
    rc.seed = seed;
    rc.out = out_path;
    rc.format = format;
    try {
        if (!config_path.empty()) parse_config_file(config_path, rc);
        parse_tols(tols, rc.tol);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (!rc.have_model) rc.model = default_model();

    try {
        auto t0 = std::chrono::steady_clock::now();
        cmt::Report rep;
        if (*c_alg) rep = cmt::suites::verify_algebra(rc.seed, rc.tol);
        else if (*c_cw) rep = cmt::suites::verify_chern_weil(rc.seed, rc.tol);
        else if (*c_me) rep = cmt::suites::verify_mehler(rc.seed, rc.tol);
        else if (*c_pa) rep = cmt::suites::verify_parametrix(rc.seed, rc.tol);
        else if (*c_to) rep = cmt::suites::run_torsion(rc.model, rc.tol);
        else if (*c_an) rep = cmt::suites::run_anomaly(rc.model, scale0, scale1, rc.tol);
        else if (*c_re) {
            rep.suite = "full-report";
            for (const cmt::Report& r :
                 {cmt::suites::verify_algebra(rc.seed, rc.tol),
                  cmt::suites::verify_chern_weil(rc.seed, rc.tol),
                  cmt::suites::verify_mehler(rc.seed, rc.tol),
                  cmt::suites::verify_parametrix(rc.seed, rc.tol),
                  cmt::suites::verify_torsion(rc.model, rc.tol),
                  cmt::suites::verify_variation(rc.model, rc.tol)}) {
                for (const auto& c : r.cases) {
                    cmt::Case cc = c;
                    cc.name = r.suite + "/" + c.name;
                    rep.cases.push_back(cc);
                }
            }
        }
        auto t1 = std::chrono::steady_clock::now();
        rep.wall_time = std::chrono::duration<double>(t1 - t0).count();
        return finish(rep, rc);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
