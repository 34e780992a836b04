// Benchmark and regression CLI for the instrumented sorter.
//
//   bench run --n 1048576 --dist random --seed 1 --variant cmp --algo fg
//   bench sweep --n-list 131072,262144,524288 --dist random
//   bench baseline record --file baselines.json
//   bench baseline check  --file baselines.json
//
// Every trial prints one self-describing record per line (or CSV with --csv).
// Exit code 0 means every requested check passed.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fgsort/bench.hpp"

using namespace fgsort;
using namespace fgsort::bench;
using nlohmann::json;

namespace {

struct Common {
    std::string dist = "random";
    uint64_t seed = 1;
    std::string variant = "cmp";
    std::string algo = "fg";
    std::string out;
    bool csv = false;
    bool no_verify = false;
    bool paranoid = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--dist", c.dist,
                    "random|sorted|reverse|few-distinct(k)|sawtooth(w)|organ-pipe");
    cmd->add_option("--seed", c.seed, "generator seed");
    cmd->add_option("--variant", c.variant, "cmp|move");
    cmd->add_option("--algo", c.algo, "fg|heapsort|mergesort");
    cmd->add_option("--out", c.out, "write records to this file instead of stdout");
    cmd->add_flag("--csv", c.csv, "emit comma-separated records with a header");
    cmd->add_flag("--no-verify", c.no_verify, "skip the sortedness/permutation oracle");
    cmd->add_flag("--paranoid", c.paranoid, "verify structure invariants during the run");
}

int fill_config(const Common& c, std::size_t n, TrialConfig& cfg) {
    auto d = parse_dist(c.dist);
    if (!d) {
        std::cerr << "unknown distribution: " << c.dist << "\n";
        return 2;
    }
    auto a = parse_algo(c.algo);
    if (!a) {
        std::cerr << "unknown algorithm: " << c.algo << "\n";
        return 2;
    }
    if (c.variant != "cmp" && c.variant != "move") {
        std::cerr << "unknown variant: " << c.variant << "\n";
        return 2;
    }
    cfg.n = n;
    cfg.dist = *d;
    cfg.seed = c.seed;
    cfg.variant = c.variant == "cmp" ? Variant::comparison_optimized : Variant::move_optimized;
    cfg.algo = *a;
    cfg.verify = !c.no_verify;
    cfg.paranoid = c.paranoid;
    return 0;
}

class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                std::cerr << "cannot open " << path << "\n";
                ok_ = false;
            }
        }
    }
    bool ok() const { return ok_; }
    std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
    bool ok_ = true;
};

int run_trials(const Common& c, const std::vector<std::size_t>& sizes) {
    Sink sink(c.out);
    if (!sink.ok()) return 2;
    if (c.csv) sink.out() << csv_header() << "\n";
    bool all_ok = true;
    for (std::size_t n : sizes) {
        TrialConfig cfg;
        if (int rc = fill_config(c, n, cfg); rc != 0) return rc;
        TrialRecord rec = run_trial(cfg);
        sink.out() << (c.csv ? to_csv_row(rec) : to_kv_line(rec)) << "\n";
        if (cfg.verify && !rec.verified) {
            std::cerr << "VERIFICATION FAILED: " << rec.verify_message << "\n";
            all_ok = false;
        }
    }
    return all_ok ? 0 : 1;
}

std::vector<std::pair<Dist, Variant>> baseline_matrix(const std::string& dists_csv) {
    std::vector<std::pair<Dist, Variant>> out;
    std::string cur;
    std::vector<std::string> names;
    for (char ch : dists_csv + ",") {
        if (ch == ',') {
            if (!cur.empty()) names.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    for (const auto& name : names) {
        auto d = parse_dist(name);
        if (!d) {
            std::cerr << "unknown distribution in --dists: " << name << "\n";
            return {};
        }
        out.emplace_back(*d, Variant::comparison_optimized);
        out.emplace_back(*d, Variant::move_optimized);
    }
    return out;
}

int baseline_record(const std::string& file, const std::string& dists_csv) {
    auto matrix = baseline_matrix(dists_csv);
    if (matrix.empty()) return 2;
    json entries = json::object();
    for (auto& [dist, variant] : matrix) {
        BaselineEntry e = measure_entry(dist, variant);
        std::string key = baseline_key(dist, variant);
        entries[key] = {{"C1", e.c1}, {"C2", e.c2}, {"C_sel", e.c_sel}, {"M_sel", e.m_sel}};
        std::cout << "recorded " << key << " C1=" << e.c1 << " C2=" << e.c2
                  << " C_sel=" << e.c_sel << " M_sel=" << e.m_sel << "\n";
    }
    json root = {{"schema", 1}, {"n", std::size_t{1} << 18}, {"entries", entries}};
    std::ofstream f(file);
    if (!f) {
        std::cerr << "cannot write " << file << "\n";
        return 2;
    }
    f << root.dump(2) << "\n";
    return 0;
}

int baseline_check(const std::string& file, const std::string& dists_csv) {
    std::ifstream f(file);
    if (!f) {
        std::cerr << "cannot read " << file << "\n";
        return 2;
    }
    json root = json::parse(f, nullptr, false);
    if (root.is_discarded() || !root.contains("entries")) {
        std::cerr << "malformed baseline file\n";
        return 2;
    }
    auto matrix = baseline_matrix(dists_csv);
    if (matrix.empty()) return 2;
    bool ok = true;
    for (auto& [dist, variant] : matrix) {
        std::string key = baseline_key(dist, variant);
        if (!root["entries"].contains(key)) {
            std::cerr << "baseline missing entry " << key << "\n";
            ok = false;
            continue;
        }
        const json& e = root["entries"][key];
        BaselineEntry now = measure_entry(dist, variant);
        auto check = [&](const char* name, double recorded, double measured) {
            bool pass = recorded > 0 && measured <= 1.05 * recorded;
            std::cout << key << " " << name << " recorded=" << recorded
                      << " measured=" << measured << (pass ? " ok" : " REGRESSION") << "\n";
            ok = ok && pass;
        };
        check("C1", e.value("C1", 0.0), now.c1);
        check("C2", e.value("C2", 0.0), now.c2);
        check("C_sel", e.value("C_sel", 0.0), now.c_sel);
        check("M_sel", e.value("M_sel", 0.0), now.m_sel);
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"instrumented in-place sorting benchmark"};
    app.require_subcommand(1);

    Common run_c;
    std::size_t run_n = 1 << 20;
    CLI::App* run = app.add_subcommand("run", "run one trial");
    run->add_option("--n", run_n, "array length")->required();
    add_common(run, run_c);

    Common sweep_c;
    std::string n_list;
    CLI::App* sweep = app.add_subcommand("sweep", "run a list of sizes");
    sweep->add_option("--n-list", n_list, "comma-separated array lengths")->required();
    add_common(sweep, sweep_c);

    CLI::App* baseline = app.add_subcommand("baseline", "recorded-constants file");
    baseline->require_subcommand(1);
    std::string bl_file = "baselines.json";
    std::string bl_dists = "random";
    CLI::App* rec = baseline->add_subcommand("record", "measure and write constants");
    rec->add_option("--file", bl_file, "baseline file path")->required();
    rec->add_option("--dists", bl_dists, "comma-separated distributions");
    CLI::App* chk = baseline->add_subcommand("check", "measure and compare against the file");
    std::string bl_file2 = "baselines.json";
    std::string bl_dists2 = "random";
    chk->add_option("--file", bl_file2, "baseline file path")->required();
    chk->add_option("--dists", bl_dists2, "comma-separated distributions");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_trials(run_c, {run_n});
    if (sweep->parsed()) {
        std::vector<std::size_t> sizes;
        std::string cur;
        for (char ch : n_list + ",") {
            if (ch == ',') {
                if (!cur.empty()) sizes.push_back(std::stoull(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        if (sizes.empty()) {
            std::cerr << "--n-list is empty\n";
            return 2;
        }
        return run_trials(sweep_c, sizes);
    }
    if (rec->parsed()) return baseline_record(bl_file, bl_dists);
    if (chk->parsed()) return baseline_check(bl_file2, bl_dists2);
    return 2;
}
