#ifndef CCSK_HARNESS_CLI_HPP
#define CCSK_HARNESS_CLI_HPP

// Command-line front end. Subcommands: train, ser, misalign, leakage, eve,
// dcsk, complexity. `--config <file>` reads flat `key = value` lines naming the
// same long flags; flags given on the command line take precedence.
//
// Exit codes: 0 success, 1 usage or validation error, 2 runtime error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccsk/channel.hpp"
#include "ccsk/error.hpp"
#include "ccsk/harness/dcsk.hpp"
#include "ccsk/harness/experiment.hpp"
#include "ccsk/harness/results.hpp"
#include "ccsk/nn/checkpoint.hpp"
#include "ccsk/nn/complexity.hpp"
#include "ccsk/nn/dataset.hpp"
#include "ccsk/nn/train.hpp"
#include "ccsk/security.hpp"

namespace ccsk::cli {

// "lo:step:hi" (inclusive) or a single value.
inline std::vector<double> parse_grid(const std::string& s)
{
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = s.find(':', start);
        const std::string tok = s.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(tok, &used));
            require(used == tok.size(), "");
        } catch (const std::exception&) {
            throw ParameterError("bad number '" + tok + "' in grid '" + s + "'");
        }
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.size() == 1) return parts;
    require(parts.size() == 3, "grid must be lo:step:hi or a single value");
    const double lo = parts[0], step = parts[1], hi = parts[2];
    require(step > 0.0 && hi >= lo, "grid needs step > 0 and hi >= lo");
    const double span = (hi - lo) / step;
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    require(n <= 100000, "grid has too many points");
    std::vector<double> g;
    for (std::size_t i = 0; i < n; ++i) g.push_back(lo + static_cast<double>(i) * step);
    return g;
}

// "lo:hi".
inline std::pair<double, double> parse_range(const std::string& s)
{
    const auto colon = s.find(':');
    require(colon != std::string::npos, "range must be lo:hi");
    try {
        return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ParameterError("bad range '" + s + "'");
    }
}

// Comma list of integers, or lo:step:hi.
inline std::vector<std::size_t> parse_index_list(const std::string& s)
{
    std::vector<std::size_t> out;
    if (s.find(':') != std::string::npos) {
        for (double v : parse_grid(s)) {
            require(v >= 0.0 && v == std::floor(v), "index list holds a non-integer");
            out.push_back(static_cast<std::size_t>(v));
        }
        return out;
    }
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(tok, &used);
            require(used == tok.size(), "");
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ParameterError("bad integer '" + tok + "' in list '" + s + "'");
        }
    }
    require(!out.empty(), "empty index list");
    return out;
}

// `key = value` lines to `--key=value` tokens; '#' starts a comment.
inline std::vector<std::string> read_config_tokens(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot read config file " + path);
    std::vector<std::string> tokens;
    std::string line;
    auto trim = [](std::string v) {
        const auto b = v.find_first_not_of(" \t\r");
        const auto e = v.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : v.substr(b, e - b + 1);
    };
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        require(!key.empty(), path + ":" + std::to_string(lineno) + ": empty key");
        if (value == "true" || value == "false") {
            if (value == "true") tokens.push_back("--" + key);
        } else {
            tokens.push_back("--" + key + "=" + value);
        }
    }
    return tokens;
}

namespace detail {

struct Common {
    std::size_t M{4}, k{32}, beta{128}, d{0}, symbols{10000}, threads{0};
    std::uint64_t seed{1};
    std::string snr{"0:2:20"}, detector{"residual"}, channel{"awgn"}, model, out, config;
    bool append{false};
};

struct TrainOpts {
    std::size_t train_size{20000}, epochs{50}, hidden{64}, heads{4}, att_dim{128}, patience{5}, batch{128};
    double dropout{0.2}, lr{1e-3};
    std::string train_snr, aux{"zero"};
};

inline void add_modem(CLI::App* a, Common& c)
{
    a->add_option("--M", c.M, "number of windows (power of 2)")->capture_default_str();
    a->add_option("--k", c.k, "information segment length")->capture_default_str();
    a->add_option("--beta", c.beta, "spreading factor (samples per frame)")->capture_default_str();
    a->add_option("--seed", c.seed, "master seed")->capture_default_str();
    a->add_option("--channel", c.channel, "awgn|rayleigh2")->capture_default_str();
    a->add_option("--threads", c.threads, "worker threads (0: $CCSK_THREADS or all cores)");
    a->add_option("--config", c.config, "flat key = value file; command-line flags override it");
}

inline void add_sweep(CLI::App* a, Common& c)
{
    a->add_option("--snr", c.snr, "Eb/N0 grid lo:step:hi in dB")->capture_default_str();
    a->add_option("--symbols", c.symbols, "symbols per grid point")->capture_default_str();
    a->add_option("--out", c.out, "CSV output path (default: stdout)");
    a->add_flag("--append", c.append, "append rows instead of overwriting");
}

inline void add_detector(CLI::App* a, Common& c)
{
    a->add_option("--detector", c.detector, "nn|residual")->capture_default_str();
    a->add_option("--model", c.model, "checkpoint path (default models/<channel>_k<k>.ccsk)");
}

inline void add_train(CLI::App* a, TrainOpts& t)
{
    a->add_option("--train-size", t.train_size, "training windows")->capture_default_str();
    a->add_option("--epochs", t.epochs, "maximum epochs")->capture_default_str();
    a->add_option("--hidden", t.hidden, "LSTM units per direction")->capture_default_str();
    a->add_option("--heads", t.heads, "attention heads")->capture_default_str();
    a->add_option("--att-dim", t.att_dim, "attention model dimension")->capture_default_str();
    a->add_option("--dropout", t.dropout, "dropout rate")->capture_default_str();
    a->add_option("--lr", t.lr, "Adam learning rate")->capture_default_str();
    a->add_option("--patience", t.patience, "early-stopping patience (epochs)")->capture_default_str();
    a->add_option("--batch", t.batch, "mini-batch size")->capture_default_str();
    a->add_option("--train-snr", t.train_snr, "training Eb/N0 range lo:hi in dB (default per channel)");
    a->add_option("--aux", t.aux, "second input channel: zero|lag")->capture_default_str();
}

inline modem::ModemConfig modem_of(const Common& c)
{
    modem::ModemConfig m;
    m.M = c.M;
    m.k = c.k;
    m.beta = c.beta;
    modem::validate(m);
    return m;
}

inline harness::ExperimentSpec spec_of(const Common& c)
{
    harness::ExperimentSpec s;
    s.detector = harness::parse_detector_kind(c.detector);
    s.channel = channel::parse_channel_kind(c.channel);
    s.modem = modem_of(c);
    s.ebn0_grid = parse_grid(c.snr);
    s.symbols_per_point = c.symbols;
    s.d = c.d;
    s.master_seed = c.seed;
    s.model_path = c.model;
    s.out_path = c.out;
    s.threads = c.threads;
    harness::validate(s);
    return s;
}

inline nn::NetConfig net_of(const TrainOpts& t, const modem::ModemConfig& m)
{
    nn::NetConfig n;
    n.hidden = t.hidden;
    n.heads = t.heads;
    n.attention_dim = t.att_dim;
    n.dropout = t.dropout;
    n.window_length = m.window();
    n.aux = nn::parse_aux_channel(t.aux);
    nn::validate(n);
    return n;
}

inline nn::TrainingConfig training_of(const TrainOpts& t, const Common& c)
{
    nn::TrainingConfig tr;
    tr.dataset_size = t.train_size;
    tr.max_epochs = t.epochs;
    tr.patience = t.patience;
    tr.batch_size = t.batch;
    tr.learning_rate = t.lr;
    tr.channel_kind = channel::parse_channel_kind(c.channel);
    tr.train_snr_range_db =
        t.train_snr.empty() ? nn::TrainingConfig::default_snr_range(tr.channel_kind) : parse_range(t.train_snr);
    tr.seed = c.seed;
    nn::validate(tr);
    require(tr.dataset_size >= 2 && tr.dataset_size % 2 == 0, "training set size must be even and >= 2");
    return tr;
}

inline void write_rows(const std::vector<harness::ResultRow>& rows, const Common& c, std::ostream& out)
{
    if (c.out.empty())
        out << harness::to_csv(rows);
    else
        harness::emit_results(rows, c.out, c.append);
}

inline void print_epoch(std::ostream& err, const char* tag, const nn::EpochStats& e)
{
    err << tag << " epoch " << e.epoch << " train_loss " << e.train_loss << " train_acc " << e.train_accuracy
        << " val_loss " << e.val_loss << " val_acc " << e.val_accuracy << '\n';
}

} // namespace detail

inline int run_cli(const std::vector<std::string>& argv_in, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr)
{
    using namespace detail;
    CLI::App app{"Combined-chaotic-sequence M-ary CSK simulator"};
    app.name(argv_in.empty() ? "ccsk" : argv_in[0]);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Common c;
    TrainOpts t;
    std::string dgrid = "0,1,2,3,4,5";
    std::vector<double> pe_values;
    std::string pe_in;
    std::size_t dcsk_L = 64;
    std::string bootstrap = "untrained", label_source = "self";
    std::size_t rounds = 1;

    auto* train = app.add_subcommand("train", "train the neural window classifier and save a checkpoint");
    add_modem(train, c);
    add_train(train, t);
    train->add_option("--model", c.model, "checkpoint output path (default models/<channel>_k<k>.ccsk)");

    auto* ser = app.add_subcommand("ser", "SER/BER sweep over Eb/N0");
    add_modem(ser, c);
    add_sweep(ser, c);
    add_detector(ser, c);
    ser->add_option("--d", c.d, "receiver misalignment in samples")->capture_default_str();

    auto* mis = app.add_subcommand("misalign", "SER sweep for several misalignments on the same frames");
    add_modem(mis, c);
    add_sweep(mis, c);
    add_detector(mis, c);
    mis->add_option("--d", dgrid, "misalignment list (e.g. 0,1,2 or 0:1:5)")->capture_default_str();

    auto* leak = app.add_subcommand("leakage", "information leakage 1 - H(Pe)");
    leak->add_option("--pe", pe_values, "error probabilities")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    leak->add_option("--in", pe_in, "results CSV; leakage is computed from each row's BER");
    leak->add_option("--config", c.config, "flat key = value file; command-line flags override it");

    auto* eve = app.add_subcommand("eve", "legitimate receiver vs self-labelling eavesdropper");
    add_modem(eve, c);
    add_sweep(eve, c);
    add_train(eve, t);
    eve->add_option("--bootstrap", bootstrap, "eavesdropper's initial labeller: untrained|random|residual")
        ->capture_default_str();
    eve->add_option("--label-source", label_source, "self|genie")->capture_default_str();
    eve->add_option("--rounds", rounds, "self-labelling rounds")->capture_default_str();

    auto* dcsk = app.add_subcommand("dcsk", "binary DCSK correlator baseline");
    add_modem(dcsk, c);
    add_sweep(dcsk, c);
    dcsk->add_option("--L", dcsk_L, "reference length (frame = 2L samples)")->capture_default_str();

    auto* cx = app.add_subcommand("complexity", "multiply-accumulate estimate of the classifier");
    std::size_t cx_T = 128;
    cx->add_option("--k", cx_T, "sequence length T")->capture_default_str();
    cx->add_option("--hidden", t.hidden, "LSTM units per direction")->capture_default_str();
    cx->add_option("--heads", t.heads, "attention heads")->capture_default_str();
    cx->add_option("--att-dim", t.att_dim, "attention model dimension")->capture_default_str();

    // Splice config-file tokens in right after the subcommand so later
    // command-line flags win.
    std::vector<std::string> args(argv_in.begin() + (argv_in.empty() ? 0 : 1), argv_in.end());
    try {
        for (std::size_t i = 1; i < args.size(); ++i) {
            std::string path;
            std::size_t drop = 0;
            if (args[i] == "--config" && i + 1 < args.size()) {
                path = args[i + 1];
                drop = 2;
            } else if (args[i].rfind("--config=", 0) == 0) {
                path = args[i].substr(9);
                drop = 1;
            }
            if (drop) {
                args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                           args.begin() + static_cast<std::ptrdiff_t>(i + drop));
                const auto tokens = read_config_tokens(path);
                args.insert(args.begin() + 1, tokens.begin(), tokens.end());
                break;
            }
        }
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        out << sub->help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << "error: " << e.what() << "\n\n" << sub->help();
        return 1;
    }

    int stage = 1;  // 1 while validating inputs, 2 once work has started
    try {
        if (*train) {
            const auto m = modem_of(c);
            const auto net = net_of(t, m);
            const auto tr = training_of(t, c);
            const auto ch = channel::ChannelConfig::of(tr.channel_kind);
            const std::string path = c.model.empty() ? harness::default_model_path(tr.channel_kind, m.k) : c.model;
            stage = 2;
            const auto data = nn::generate_dataset(tr.dataset_size, m, ch, tr, derive_seed(c.seed, {0xda7a}));
            auto res = nn::train(data, net, tr, [&err](const nn::EpochStats& e) { print_epoch(err, "train", e); });
            if (res.diverged) err << "warning: training diverged; saving the best checkpoint seen\n";
            nn::save_params(res.params, path);
            out << "saved " << path << " best_epoch " << res.best_epoch << " val_acc "
                << res.history.at(res.best_epoch ? res.best_epoch - 1 : 0).val_accuracy << '\n';
        } else if (*ser) {
            const auto spec = spec_of(c);
            stage = 2;
            write_rows(harness::run_ser_sweep(spec), c, out);
        } else if (*mis) {
            const auto spec = spec_of(c);
            const auto ds = parse_index_list(dgrid);
            for (auto d : ds) require(d < spec.modem.k, "misalignment d must be smaller than k");
            stage = 2;
            write_rows(harness::run_misalignment_sweep(spec, ds), c, out);
        } else if (*leak) {
            for (double pe : pe_values) require(pe >= 0.0 && pe <= 1.0, "pe must lie in [0,1]");
            require(!pe_values.empty() || !pe_in.empty(), "give --pe values or --in results.csv");
            stage = 2;
            out << "pe,leakage\n";
            for (double pe : pe_values) out << harness::detail::fmt_real(pe) << ','
                                            << harness::detail::fmt_real(security::leakage_rate(pe)) << '\n';
            if (!pe_in.empty())
                for (const auto& r : harness::read_results(pe_in))
                    out << harness::detail::fmt_real(r.ber) << ','
                        << harness::detail::fmt_real(security::leakage_rate(r.ber)) << '\n';
        } else if (*eve) {
            auto spec = spec_of(c);
            spec.detector = harness::DetectorKind::Neural;
            const auto net = net_of(t, spec.modem);
            const auto tr = training_of(t, c);
            security::EavesdropperConfig ec;
            ec.bootstrap = security::parse_bootstrap(bootstrap);
            require(label_source == "self" || label_source == "genie", "label source must be self|genie");
            ec.label_source = label_source == "genie" ? security::LabelSource::Genie : security::LabelSource::SelfEstimated;
            ec.rounds = rounds;
            require(rounds >= 1, "rounds must be >= 1");
            stage = 2;
            const auto res = security::simulate_eavesdropper(ec, spec, net, tr, c.seed);
            err << "legit window accuracy " << res.legit_window_accuracy << ", eve window accuracy "
                << res.eve_window_accuracy << ", eve label accuracy " << res.eve_label_accuracy << '\n';
            std::vector<harness::ResultRow> rows;
            for (const auto& p : res.points) rows.push_back(harness::make_row(spec, "nn-legit", 0, p.ebn0_db, p.legit));
            for (const auto& p : res.points) rows.push_back(harness::make_row(spec, "nn-eve", 0, p.ebn0_db, p.eve));
            write_rows(rows, c, out);
            if (c.out.empty()) out << '\n';
            out << "ebn0_db,legit_ber,eve_ber,legit_leakage,eve_leakage\n";
            for (const auto& p : res.points)
                out << harness::detail::fmt_real(p.ebn0_db) << ',' << harness::detail::fmt_real(p.legit_ber) << ','
                    << harness::detail::fmt_real(p.eve_ber) << ',' << harness::detail::fmt_real(p.legit_leakage)
                    << ',' << harness::detail::fmt_real(p.eve_leakage) << '\n';
        } else if (*dcsk) {
            harness::ExperimentSpec spec;
            spec.channel = channel::parse_channel_kind(c.channel);
            spec.ebn0_grid = parse_grid(c.snr);
            spec.symbols_per_point = c.symbols;
            spec.master_seed = c.seed;
            spec.threads = c.threads;
            require(spec.symbols_per_point >= 100, "symbols per point must be >= 100");
            harness::DcskConfig dc{dcsk_L};
            harness::validate(dc);
            stage = 2;
            write_rows(harness::dcsk_baseline(spec, dc), c, out);
        } else if (*cx) {
            nn::NetConfig net;
            net.hidden = t.hidden;
            net.heads = t.heads;
            net.attention_dim = t.att_dim;
            net.window_length = cx_T;
            const auto rep = nn::estimate_complexity(net);
            stage = 2;
            for (const auto& term : rep.terms) out << term.name << ' ' << term.macs << '\n';
            out << "total " << rep.total << '\n';
        }
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return stage == 1 ? 1 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

} // namespace ccsk::cli

#endif
