#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "chshkyber/chsh.hpp"
#include "chshkyber/estimator.hpp"
#include "chshkyber/evolution.hpp"
#include "chshkyber/hamiltonian.hpp"
#include "chshkyber/mlwe.hpp"
#include "chshkyber/session.hpp"

namespace ck = chshkyber;
using nlohmann::json;

namespace {

struct GlobalOpts {
    uint64_t seed = 0;
    std::string config_path;
    std::string out_path;
    std::string format = "json";
};

void write_output(const GlobalOpts& opts, const std::string& text) {
    if (opts.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream f(opts.out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + opts.out_path);
        f << text;
    }
}

std::string fixed1(double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << x;
    return os.str();
}

ck::Strategy parse_strategy(const std::string& s) {
    if (s == "quantum") return ck::Strategy::quantum_ideal();
    if (s.rfind("noisy:", 0) == 0) return ck::Strategy::quantum_noisy(std::stod(s.substr(6)));
    if (s == "lhv:random") {
        std::vector<std::pair<ck::DetTable, double>> mix;
        for (const auto& t : ck::all_det_tables()) mix.emplace_back(t, 1.0 / 16.0);
        return ck::Strategy::classical_random(std::move(mix));
    }
    if (s.rfind("lhv:", 0) == 0) {
        // lhv:fx0,fx1,gy0,gy1 with entries +-1 (lhv:table is the best classical table)
        if (s == "lhv:table") return ck::Strategy::classical(ck::DetTable{});
        std::istringstream is(s.substr(4));
        ck::DetTable t;
        char comma;
        if (!(is >> t.fx[0] >> comma >> t.fx[1] >> comma >> t.gy[0] >> comma >> t.gy[1]))
            throw CLI::ValidationError("--strategy", "bad lhv table: " + s);
        return ck::Strategy::classical(t);
    }
    throw CLI::ValidationError("--strategy", "unknown strategy: " + s);
}

ck::NoiseSpec parse_noise(const std::string& s) {
    if (s == "uniform") return ck::NoiseSpec::uniform();
    if (s.rfind("cbd:", 0) == 0) return ck::NoiseSpec::cbd(uint32_t(std::stoul(s.substr(4))));
    if (s.rfind("table:", 0) == 0) {
        std::ifstream f(s.substr(6));
        if (!f) throw CLI::ValidationError("--noise", "cannot open table file");
        json j;
        f >> j;
        std::map<int64_t, double> table;
        for (auto& [key, val] : j.items()) table[std::stoll(key)] = val.get<double>();
        return ck::NoiseSpec::from_table(std::move(table));
    }
    throw CLI::ValidationError("--noise", "unknown noise spec: " + s);
}

ck::SessionConfig load_session_config(const GlobalOpts& opts) {
    ck::SessionConfig config;
    if (!opts.config_path.empty()) {
        std::ifstream f(opts.config_path);
        if (!f) throw std::runtime_error("cannot open config file: " + opts.config_path);
        json j;
        f >> j;
        config = ck::config_from_json(j);
    } else {
        config.params = ck::toy_params();
    }
    // seed priority: CHSHKYBER_SEED env < --seed flag; config seed otherwise
    if (const char* env = std::getenv("CHSHKYBER_SEED"))
        config.seed = ck::seed_from_u64(std::stoull(env));
    if (opts.seed != 0) config.seed = ck::seed_from_u64(opts.seed);
    if (opts.config_path.empty() && opts.seed == 0 && !std::getenv("CHSHKYBER_SEED"))
        config.seed = ck::seed_from_u64(0);
    config.params.seed = config.seed;
    return config;
}

std::string table2_csv() {
    std::ostringstream os;
    os << "paramset,standard_bits,qcs_bits,chsh_bits,qcs_pct,chsh_pct,differential_pct\n";
    for (const auto& row : ck::table_report()) {
        os << row.paramset << ',' << fixed1(row.standard_bits) << ',' << fixed1(row.qcs_bits)
           << ',' << fixed1(row.chsh_bits) << ',' << fixed1(row.qcs_pct) << ','
           << fixed1(row.chsh_pct) << ',' << fixed1(row.differential_pct) << '\n';
    }
    return os.str();
}

std::string table1_csv(size_t m) {
    const auto rep = ck::resource_report(m);
    std::ostringstream os;
    os << "metric,value\n";
    os << "epr_pairs," << rep.epr_pairs << '\n';
    os << "qubits," << rep.qubits << '\n';
    os << "classical_bits," << rep.classical_bits << '\n';
    os << "entangling_gates," << rep.entangling_gates << '\n';
    os << "single_qubit_gates," << rep.single_qubit_gates << '\n';
    os << "measurements," << rep.measurements << '\n';
    os << "circuit_depth," << rep.circuit_depth << '\n';
    os << "latency_note," << rep.latency_note << '\n';
    os << "hardware_note," << rep.hardware_note << '\n';
    return os.str();
}

json estimate_to_json(const ck::ChshEstimate& est) {
    return json{{"e_hat", est.e_hat},
                {"s_hat", est.s_hat},
                {"ci", est.ci_half_width},
                {"violated", est.violated},
                {"correlators", est.correlators}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CHSH-certified Kyber protocol simulator"};
    app.require_subcommand(1);

    GlobalOpts opts;
    app.add_option("--seed", opts.seed, "deterministic root seed");
    app.add_option("--config", opts.config_path, "session config JSON file");
    app.add_option("--out", opts.out_path, "output file (stdout when omitted)");
    app.add_option("--format", opts.format, "output format")->check(CLI::IsMember({"json", "csv"}));

    // keygen
    auto* cmd_keygen = app.add_subcommand("keygen", "generate a KEM key pair");
    std::string paramset = "toy";
    cmd_keygen->add_option("--paramset", paramset, "toy|small");

    // session / campaign
    auto* cmd_session = app.add_subcommand("session", "run one protocol session");
    auto* cmd_campaign = app.add_subcommand("campaign", "run an evolving multi-session campaign");
    size_t campaign_sessions = 0;
    cmd_campaign->add_option("--sessions", campaign_sessions, "override session count");

    // chsh
    auto* cmd_chsh = app.add_subcommand("chsh", "run a standalone CHSH game");
    std::string strategy_str = "quantum";
    size_t chsh_m = 4096;
    double chsh_epsilon = ck::kDefaultEpsilon;
    cmd_chsh->add_option("--strategy", strategy_str, "quantum|noisy:v|lhv:table|lhv:a,b,c,d|lhv:random");
    cmd_chsh->add_option("--m", chsh_m, "number of rounds");
    cmd_chsh->add_option("--epsilon", chsh_epsilon, "confidence parameter");

    // markov
    auto* cmd_markov = app.add_subcommand("markov", "spectral analysis of a key-evolution chain");
    size_t mk_n = 1;
    uint32_t mk_q = 5;
    std::string mk_matrix = "1";
    std::string mk_noise = "uniform";
    double mk_epsilon = 0.01;
    std::string mk_kernel_csv;
    cmd_markov->add_option("--n", mk_n, "chain dimension");
    cmd_markov->add_option("--q", mk_q, "modulus");
    cmd_markov->add_option("--M", mk_matrix, "comma-separated row-major transition matrix");
    cmd_markov->add_option("--noise", mk_noise, "cbd:eta|uniform|table:file");
    cmd_markov->add_option("--epsilon", mk_epsilon, "TV mixing target");
    cmd_markov->add_option("--kernel-csv", mk_kernel_csv, "also dump the kernel as CSV");

    // hamiltonian
    auto* cmd_ham = app.add_subcommand("hamiltonian", "reduce a CHSH transcript to a 2-local instance");
    std::string ham_transcript;
    double ham_alpha = 0.0, ham_beta = 0.0;
    bool ham_promise = false;
    cmd_ham->add_option("--transcript", ham_transcript, "transcript JSON file")->required();
    auto* alpha_opt = cmd_ham->add_option("--alpha", ham_alpha, "promise alpha");
    cmd_ham->add_option("--beta", ham_beta, "promise beta")->needs(alpha_opt);

    // estimate / report
    auto* cmd_est = app.add_subcommand("estimate", "single bit-security estimate");
    std::string est_paramset = "kyber512", est_variant = "chsh", est_family = "bkz",
                est_model = "multiplicative";
    double est_beta = -1.0;
    cmd_est->add_option("--paramset", est_paramset, "kyber512|kyber768|kyber1024");
    cmd_est->add_option("--variant", est_variant, "standard|qcs|chsh");
    cmd_est->add_option("--family", est_family, "central|bkz|enum");
    cmd_est->add_option("--model", est_model, "multiplicative|log_additive");
    cmd_est->add_option("--beta", est_beta, "override beta_tilde");

    auto* cmd_report = app.add_subcommand("report", "emit the security and resource tables");
    size_t report_m = 512;
    cmd_report->add_option("--m", report_m, "EPR pair count for the resource table");

    // let --seed/--out/--format appear after the subcommand name as well
    for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cmd_keygen) {
            ck::Params params = paramset == "small" ? ck::small_params() : ck::toy_params();
            params.seed = ck::seed_from_u64(opts.seed);
            ck::DetRng rng(params.seed, "cli/keygen");
            const ck::KeyPair kp = ck::keygen(params, rng);
            json j;
            j["params"] = {{"n", params.n}, {"k", params.k}, {"q", params.q}, {"eta", params.eta}};
            j["A"] = kp.pk.A.data;
            j["t"] = kp.pk.t.v;
            j["s"] = kp.s.v;
            write_output(opts, j.dump(2));
            return 0;
        }

        if (*cmd_session) {
            ck::SessionConfig config = load_session_config(opts);
            config.sessions = 1;
            const ck::SessionResult result = ck::run_session(config);
            write_output(opts, ck::transcript_json(config, result).dump(2));
            return result.accepted ? 0 : 1;
        }

        if (*cmd_campaign) {
            ck::SessionConfig config = load_session_config(opts);
            if (campaign_sessions > 0) config.sessions = campaign_sessions;
            if (config.sessions < 2) config.sessions = 2;
            const ck::CampaignResult campaign = ck::run_campaign(config);
            if (opts.format == "csv") {
                std::ostringstream os;
                os << "session_id,accepted,match,e_hat\n";
                for (const auto& r : campaign.results)
                    os << r.session_id << ',' << (r.accepted ? 1 : 0) << ','
                       << (r.shared_secret_match ? 1 : 0) << ',' << r.chsh_estimate.e_hat << '\n';
                write_output(opts, os.str());
            } else {
                json j;
                j["config"] = ck::config_json(config);
                json sessions = json::array();
                for (const auto& r : campaign.results)
                    sessions.push_back({{"session_id", r.session_id},
                                        {"accepted", r.accepted},
                                        {"match", r.shared_secret_match},
                                        {"e_hat", r.chsh_estimate.e_hat}});
                j["sessions"] = std::move(sessions);
                j["summary"] = {{"accepted", campaign.summary.accepted},
                                {"matched", campaign.summary.matched},
                                {"key_collisions", campaign.summary.key_collisions},
                                {"frozen_secrets", campaign.summary.frozen_secrets}};
                if (campaign.summary.secret_tv_to_stationary)
                    j["summary"]["secret_tv_to_stationary"] = *campaign.summary.secret_tv_to_stationary;
                write_output(opts, j.dump(2));
            }
            return campaign.summary.accepted == campaign.summary.sessions ? 0 : 1;
        }

        if (*cmd_chsh) {
            const ck::Strategy strategy = parse_strategy(strategy_str);
            ck::DetRng rng(ck::seed_from_u64(opts.seed), "cli/chsh");
            const ck::GameResult game = ck::run_game(strategy, chsh_m, rng, chsh_epsilon);
            json rounds = json::array();
            for (const auto& r : game.transcript.rounds)
                rounds.push_back({{"a", r.a}, {"b", r.b}, {"x", r.x}, {"y", r.y}, {"c", r.c}});
            json j;
            j["strategy"] = game.transcript.strategy_tag;
            j["chsh"] = std::move(rounds);
            j["estimate"] = estimate_to_json(game.estimate);
            write_output(opts, j.dump(2));
            return game.estimate.violated ? 0 : 1;
        }

        if (*cmd_markov) {
            ck::ChainSpec spec;
            spec.n = mk_n;
            spec.q = mk_q;
            spec.noise = parse_noise(mk_noise);
            spec.M = ck::zeros_mat(mk_n, mk_n, mk_q);
            {
                std::istringstream is(mk_matrix);
                std::string tok;
                size_t idx = 0;
                while (std::getline(is, tok, ',')) {
                    if (idx >= mk_n * mk_n) throw std::runtime_error("--M has too many entries");
                    spec.M.data[idx++] = ck::mod_reduce(std::stoll(tok), mk_q);
                }
                if (idx != mk_n * mk_n) throw std::runtime_error("--M has too few entries");
            }
            const ck::KernelMatrix kernel = ck::build_kernel(spec);
            const ck::SpectralReport rep = ck::spectral_report(kernel, mk_epsilon);
            if (!mk_kernel_csv.empty()) {
                std::ofstream f(mk_kernel_csv);
                for (size_t i = 0; i < kernel.size; ++i) {
                    for (size_t j = 0; j < kernel.size; ++j)
                        f << (j ? "," : "") << kernel.at(i, j);
                    f << '\n';
                }
            }
            json j;
            j["states"] = kernel.size;
            j["eigenvalue_magnitudes"] = rep.eigenvalue_magnitudes;
            j["gap"] = rep.gap;
            j["epsilon"] = rep.epsilon;
            j["tau_mix_bound"] = rep.tau_mix_bound;
            j["tau_mix_empirical"] = rep.tau_mix_empirical;
            j["irreducible"] = rep.irreducible;
            j["aperiodic"] = rep.aperiodic;
            j["stationary"] = rep.stationary;
            write_output(opts, j.dump(2));
            return 0;
        }

        if (*cmd_ham) {
            std::ifstream f(ham_transcript);
            if (!f) throw std::runtime_error("cannot open transcript: " + ham_transcript);
            json tj;
            f >> tj;
            ck::ChshTranscript transcript;
            const json& rounds = tj.contains("chsh") ? tj.at("chsh") : tj;
            for (const auto& r : rounds) {
                ck::ChshRound round;
                round.a = r.at("a").get<int>();
                round.b = r.at("b").get<int>();
                round.x = r.at("x").get<int>();
                round.y = r.at("y").get<int>();
                round.c = r.value("c", round.x * round.y * ((round.a & round.b) ? -1 : 1));
                transcript.rounds.push_back(round);
            }
            const ck::HamiltonianInstance inst = ck::instance_from_transcript(transcript);
            json j;
            j["pair_count"] = inst.pair_count;
            j["norm_check"] = inst.norm_check;
            j["per_pair_energies"] = ck::per_pair_energies(inst);
            j["ground_energy"] = ck::ground_energy(inst);
            ham_promise = alpha_opt->count() > 0;
            if (ham_promise) {
                const auto decision =
                    ck::decide_promise(ck::PromiseInstance{inst, ham_alpha, ham_beta});
                j["decision"] = decision == ck::PromiseDecision::Yes
                                    ? "YES"
                                    : decision == ck::PromiseDecision::No ? "NO" : "outside_promise";
            }
            write_output(opts, j.dump(2));
            return 0;
        }

        if (*cmd_est) {
            ck::Variant variant = est_variant == "standard" ? ck::Variant::standard()
                                  : est_variant == "qcs"    ? ck::Variant::qcs()
                                                            : ck::Variant::chsh();
            if (est_beta >= 0) variant.beta_tilde = est_beta;
            const ck::AttackTag family = est_family == "central" ? ck::AttackTag::CentralReduction
                                         : est_family == "enum"  ? ck::AttackTag::Enumeration
                                                                 : ck::AttackTag::Bkz;
            const ck::ScalingModel model = est_model == "log_additive"
                                               ? ck::ScalingModel::LogAdditive
                                               : ck::ScalingModel::Multiplicative;
            json j;
            j["paramset"] = est_paramset;
            j["variant"] = est_variant;
            j["family"] = est_family;
            j["model"] = est_model;
            j["beta_tilde"] = variant.beta_tilde;
            j["bits"] = ck::family_bits(est_paramset, family, variant, model);
            j["delta_blocksize"] = ck::delta_blocksize(variant.beta_tilde);
            write_output(opts, j.dump(2));
            return 0;
        }

        if (*cmd_report) {
            if (opts.format == "csv") {
                write_output(opts, table2_csv() + "\n" + table1_csv(report_m));
            } else {
                json j;
                json rows = json::array();
                for (const auto& row : ck::table_report())
                    rows.push_back({{"paramset", row.paramset},
                                    {"standard_bits", row.standard_bits},
                                    {"qcs_bits", row.qcs_bits},
                                    {"chsh_bits", row.chsh_bits},
                                    {"qcs_pct", row.qcs_pct},
                                    {"chsh_pct", row.chsh_pct},
                                    {"differential_pct", row.differential_pct}});
                j["security_table"] = std::move(rows);
                const auto rep = ck::resource_report(report_m);
                j["resource_table"] = {{"epr_pairs", rep.epr_pairs},
                                       {"qubits", rep.qubits},
                                       {"classical_bits", rep.classical_bits},
                                       {"entangling_gates", rep.entangling_gates},
                                       {"single_qubit_gates", rep.single_qubit_gates},
                                       {"measurements", rep.measurements},
                                       {"circuit_depth", rep.circuit_depth},
                                       {"latency_note", rep.latency_note},
                                       {"hardware_note", rep.hardware_note}};
                write_output(opts, j.dump(2));
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
