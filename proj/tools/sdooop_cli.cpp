// sdooop: generate, score, evaluate and inspect timestamped point streams.
//
// Exit codes: 0 success, 2 usage, 3 parse, 4 data contract, 5 I/O.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sdooop/io/csv.hpp"
#include "sdooop/io/snapshot.hpp"
#include "sdooop/io/units.hpp"
#include "sdooop/sdooop.hpp"

namespace {

using namespace sdooop;

enum ExitCode : int { ok = 0, usage = 2, parse = 3, data = 4, io_error = 5 };

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Output to a file or stdout.
class Output {
public:
    explicit Output(const std::string& path)
    {
        if (path.empty() || path == "-") {
            stream_ = &std::cout;
        } else {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_)
                throw IoError("cannot open '" + path + "' for writing");
            stream_ = file_.get();
        }
    }
    std::ostream& operator*() { return *stream_; }
    void finish()
    {
        stream_->flush();
        if (!*stream_)
            throw IoError("write failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

class Input {
public:
    explicit Input(const std::string& path)
    {
        if (path.empty() || path == "-") {
            stream_ = &std::cin;
        } else {
            file_ = std::make_unique<std::ifstream>(path);
            if (!*file_)
                throw IoError("cannot open '" + path + "'");
            stream_ = file_.get();
        }
    }
    std::istream& operator*() { return *stream_; }

private:
    std::unique_ptr<std::ifstream> file_;
    std::istream* stream_;
};

void write_file_atomic(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            throw IoError("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out)
            throw IoError("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot move snapshot into '" + path + "': " + ec.message());
}

// ---------------------------------------------------------------- gen

double json_duration(const nlohmann::json& j)
{
    if (j.is_string())
        return io::parse_duration(j.get<std::string>());
    return j.get<double>();
}

StreamSpec load_stream_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open spec '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
        StreamSpec spec;
        spec.dims = doc.at("dims").get<std::size_t>();
        spec.duration = json_duration(doc.at("duration"));
        spec.seed = doc.value("seed", std::uint64_t{0});
        spec.spatial_outlier_rate = doc.value("spatial_outlier_rate", 0.0);
        spec.contextual_outlier_rate = doc.value("contextual_outlier_rate", 0.0);
        for (const auto& c : doc.at("clusters")) {
            ClusterSpec cs;
            cs.center = c.at("center").get<std::vector<double>>();
            cs.radius = c.at("radius").get<double>();
            cs.base_rate = c.at("base_rate").get<double>();
            cs.on_start = c.value("on_start", 0.0);
            cs.on_end = c.value("on_end", 1.0);
            cs.period = json_duration(c.at("period"));
            spec.clusters.push_back(std::move(cs));
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw io::ParseError(1, std::string("spec '") + path + "': " + e.what());
    }
}

struct GenOptions {
    std::string preset;
    std::string spec_file;
    double contextual_rate = 0.005;
    std::optional<std::uint64_t> seed;
    std::string duration;
    std::string T0 = "100";
    std::string out;
};

int run_gen(const GenOptions& o)
{
    StreamSpec spec;
    if (!o.spec_file.empty()) {
        spec = load_stream_spec(o.spec_file);
        if (o.seed)
            spec.seed = *o.seed;
        if (!o.duration.empty())
            spec.duration = io::parse_duration(o.duration);
    } else if (o.preset == "poc") {
        const double T0 = io::parse_duration(o.T0);
        const double duration = o.duration.empty() ? 0.0 : io::parse_duration(o.duration);
        spec = poc_preset(o.contextual_rate, o.seed.value_or(0), T0, duration);
    } else {
        throw InvalidParameter("gen needs --preset poc or --spec FILE");
    }
    StreamGenerator gen(spec);
    Output out(o.out);
    io::write_stream_header(*out, spec.dims, true);
    while (auto p = gen.next())
        io::write_labeled_point(*out, *p);
    out.finish();
    return ok;
}

// ---------------------------------------------------------------- score

struct ScoreOptions {
    std::string algo = "sdooop";
    std::size_t k = 256;
    std::size_t x = 5;
    std::string T = "1000";
    std::string T0 = "100";
    std::size_t bins = 10;
    double qid = 0.2;
    std::uint64_t seed = 0;
    std::string distance = "euclidean";
    std::size_t ensemble = 1;
    std::string model_out;
    std::string checkpoint_every;
    std::string window = "100";
    std::size_t knn = 5;
    std::string in;
    std::string out;
};

int run_score(const ScoreOptions& o)
{
    std::variant<std::monostate, Ensemble, SWKnn> detector;
    if (o.algo == "sdooop") {
        ModelParams p;
        p.k = o.k;
        p.x = o.x;
        p.T = io::parse_duration(o.T);
        p.T0 = io::parse_duration(o.T0);
        p.n_bins = o.bins;
        p.q_id = o.qid;
        p.seed = o.seed;
        p.distance = parse_distance(o.distance);
        p.validate();
        for (const auto& w : p.warnings())
            std::cerr << "warning: " << w << '\n';
        detector.emplace<Ensemble>(p, o.ensemble);
    } else if (o.algo == "swknn") {
        if (!o.model_out.empty())
            throw InvalidParameter("--model-out is only available for --algo sdooop");
        SWKnnParams p;
        p.window = io::parse_duration(o.window);
        p.k_nn = o.knn;
        p.distance = parse_distance(o.distance);
        detector.emplace<SWKnn>(p);
    } else {
        throw InvalidParameter("unknown --algo '" + o.algo + "' (expected sdooop or swknn)");
    }

    const double checkpoint_every = o.checkpoint_every.empty() ? 0.0 : io::parse_duration(o.checkpoint_every);
    if (checkpoint_every > 0.0 && o.model_out.empty())
        throw InvalidParameter("--checkpoint-every requires --model-out");

    auto save_model = [&]() {
        if (o.model_out.empty())
            return;
        std::vector<ModelSnapshot> snaps;
        for (const auto& m : std::get<Ensemble>(detector).members())
            snaps.push_back(m.snapshot());
        write_file_atomic(o.model_out, io::dump_snapshots(snaps));
    };

    Input in(o.in);
    io::StreamReader reader(*in);
    Output out(o.out);
    io::write_score_header(*out);

    std::optional<double> next_checkpoint;
    while (auto row = reader.next()) {
        ScoreRecord rec;
        try {
            if (auto* ens = std::get_if<Ensemble>(&detector))
                rec = ens->process(row->v, row->t);
            else
                rec = std::get<SWKnn>(detector).process(row->v, row->t);
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(row->line) + ": " + e.what());
        }
        io::write_score_row(*out, rec);
        if (checkpoint_every > 0.0) {
            if (!next_checkpoint)
                next_checkpoint = row->t + checkpoint_every;
            if (row->t >= *next_checkpoint) {
                save_model();
                while (*next_checkpoint <= row->t)
                    *next_checkpoint += checkpoint_every;
            }
        }
    }
    out.finish();
    save_model();
    return ok;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
    std::string scores;
    std::string labels;
    bool drop_warmup = false;
    bool by_class = false;
    std::string from;   // ignore records before this stream time
    std::string out;
};

int run_eval(const EvalOptions& o)
{
    Input score_in(o.scores);
    Input label_in(o.labels);
    io::ScoreReader scores(*score_in);
    io::StreamReader labels(*label_in);
    if (!labels.has_label())
        throw io::ParseError(1, "labels file '" + o.labels + "' has no 'label' column");

    const double from = o.from.empty() ? 0.0 : io::parse_duration(o.from);
    std::vector<double> s;
    std::vector<int> cls;
    while (true) {
        auto r = scores.next();
        auto l = labels.next();
        if (!r && !l)
            break;
        if (!r || !l)
            throw DataError("score and label files differ in length (first difference at score line " +
                            std::to_string(scores.line()) + ", label line " + std::to_string(labels.line()) + ")");
        if ((o.drop_warmup && r->warmup) || r->t < from)
            continue;
        s.push_back(r->score);
        cls.push_back(*l->label);
    }

    struct Row {
        std::string subset;
        metrics::Summary m;
    };
    std::vector<Row> rows;
    auto evaluate = [&](const std::string& name, auto keep) {
        metrics::ScoredLabels d;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (keep(cls[i])) {
                d.scores.push_back(s[i]);
                d.labels.push_back(cls[i] != 0 ? 1 : 0);
            }
        try {
            rows.push_back({name, metrics::summarize(d)});
        } catch (const InvalidParameter& e) {
            throw DataError(name + ": " + e.what());
        }
    };
    evaluate("all", [](int) { return true; });
    if (o.by_class) {
        evaluate("spatial", [](int c) { return c != 2; });
        evaluate("contextual", [](int c) { return c != 1; });
    }

    std::cout << std::left << std::setw(12) << "subset" << std::right << std::setw(10) << "records"
              << std::setw(10) << "outliers" << std::setw(10) << "AUC" << std::setw(10) << "AAP" << std::setw(10)
              << "AP@n" << '\n';
    for (const auto& r : rows)
        std::cout << std::left << std::setw(12) << r.subset << std::right << std::setw(10) << r.m.records
                  << std::setw(10) << r.m.outliers << std::fixed << std::setprecision(4) << std::setw(10) << r.m.auc
                  << std::setw(10) << r.m.aap << std::setw(10) << r.m.ap_at_n << '\n';

    if (!o.out.empty()) {
        Output out(o.out);
        *out << "subset,records,outliers,auc,ap,aap,p_at_n,ap_at_n\n";
        for (const auto& r : rows)
            *out << r.subset << ',' << r.m.records << ',' << r.m.outliers << ',' << io::format_double(r.m.auc) << ','
                 << io::format_double(r.m.ap) << ',' << io::format_double(r.m.aap) << ','
                 << io::format_double(r.m.p_at_n) << ',' << io::format_double(r.m.ap_at_n) << '\n';
        out.finish();
    }
    return ok;
}

// ---------------------------------------------------------------- inspect

struct InspectOptions {
    std::string model;
    std::size_t member = 0;
    bool spectrum = false;
    bool shape = false;
    bool observers = false;
    std::string sampling_log;
    std::string horizon;
    std::size_t samples = 64;
    std::size_t top = 0;
    std::string interval = "1d";
    std::string out;
};

// Observer indices, strongest time-averaged mass first when `top` is set.
std::vector<std::size_t> pick_observers(const Model& m, std::size_t top)
{
    std::vector<std::size_t> idx(m.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (top > 0 && top < idx.size()) {
        const auto obs = m.observers();
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return obs[a].p0() > obs[b].p0(); });
        idx.resize(top);
    }
    return idx;
}

int run_sampling_log(const InspectOptions& o)
{
    const double interval = io::parse_duration(o.interval);
    if (!(interval > 0.0))
        throw InvalidParameter("--interval must be positive");
    Input in(o.sampling_log);
    io::ScoreReader reader(*in);
    std::map<long long, std::size_t> counts;
    std::optional<long long> first, last;
    while (auto r = reader.next()) {
        const auto bucket = static_cast<long long>(std::floor(r->t / interval));
        if (!first)
            first = bucket;
        last = bucket;
        if (r->sampled)
            ++counts[bucket];
    }
    Output out(o.out);
    *out << "interval_start,samples\n";
    if (first)
        for (long long b = *first; b <= *last; ++b)
            *out << io::format_double(static_cast<double>(b) * interval) << ',' << counts[b] << '\n';
    out.finish();
    return ok;
}

int run_inspect(const InspectOptions& o)
{
    const int modes = (o.spectrum ? 1 : 0) + (o.shape ? 1 : 0) + (o.observers ? 1 : 0) + (o.sampling_log.empty() ? 0 : 1);
    if (modes != 1)
        throw InvalidParameter("choose exactly one of --spectrum, --shape, --observers, --sampling-log");
    if (!o.sampling_log.empty())
        return run_sampling_log(o);
    if (o.model.empty())
        throw InvalidParameter("--model is required for this mode");

    const auto snaps = io::load_snapshots(o.model);
    if (o.member >= snaps.size())
        throw InvalidParameter("--member " + std::to_string(o.member) + " out of range (" +
                               std::to_string(snaps.size()) + " members)");
    const Model model = Model::restore(snaps[o.member]);
    const auto obs = model.observers();
    const auto picked = pick_observers(model, o.top);
    Output out(o.out);

    if (o.spectrum) {
        *out << "observer";
        for (std::size_t n = 0; n < model.params().n_bins; ++n)
            *out << ",b" << n;
        *out << '\n';
        for (auto i : picked) {
            *out << i;
            for (double mag : spectrum_magnitude(obs[i]))
                *out << ',' << io::format_double(mag);
            *out << '\n';
        }
    } else if (o.shape) {
        const double horizon = o.horizon.empty() ? model.params().T0 : io::parse_duration(o.horizon);
        if (o.samples < 1)
            throw InvalidParameter("--samples must be >= 1");
        *out << "offset";
        for (auto i : picked)
            *out << ",g" << i;
        *out << '\n';
        for (std::size_t s = 0; s < o.samples; ++s) {
            const double offset = horizon * static_cast<double>(s) / static_cast<double>(o.samples);
            *out << io::format_double(offset);
            for (auto i : picked)
                *out << ',' << io::format_double(temporal_shape(obs[i], offset, model.params()));
            *out << '\n';
        }
    } else {
        const auto active = model.empty() ? std::vector<std::size_t>{} : model.active_observers();
        *out << "observer,inserted_at,p0,h,normalized_mass,activity,active";
        for (std::size_t d = 0; d < model.dims(); ++d)
            *out << ",f" << d;
        *out << '\n';
        for (auto i : picked) {
            const bool is_active = std::find(active.begin(), active.end(), i) != active.end();
            *out << i << ',' << io::format_double(obs[i].inserted_at) << ',' << io::format_double(obs[i].p0()) << ','
                 << io::format_double(obs[i].h) << ',' << io::format_double(obs[i].normalized_mass()) << ','
                 << io::format_double(obs[i].activity()) << ',' << (is_active ? 1 : 0);
            for (double f : obs[i].position)
                *out << ',' << io::format_double(f);
            *out << '\n';
        }
    }
    out.finish();
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Streaming outlier detection with periodic observer models"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a labeled synthetic stream");
    gen_cmd->add_option("--preset", gen.preset, "Built-in stream preset (poc)");
    gen_cmd->add_option("--spec", gen.spec_file, "JSON stream spec file");
    gen_cmd->add_option("--contextual-rate", gen.contextual_rate, "Fraction of contextual outliers (preset)");
    gen_cmd->add_option("--seed", gen.seed, "RNG seed");
    gen_cmd->add_option("--duration", gen.duration, "Stream duration, e.g. 4000 or 2h");
    gen_cmd->add_option("--T0", gen.T0, "Base period of the preset")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "Output CSV (default stdout)");

    ScoreOptions sc;
    auto* score_cmd = app.add_subcommand("score", "Score a stream");
    score_cmd->add_option("--algo", sc.algo, "sdooop or swknn")->capture_default_str();
    score_cmd->add_option("--k", sc.k, "Number of observers")->capture_default_str();
    score_cmd->add_option("--x", sc.x, "Nearest observers per point")->capture_default_str();
    score_cmd->add_option("--T", sc.T, "EWMA time constant (s/m/h/d/w suffix)")->capture_default_str();
    score_cmd->add_option("--T0", sc.T0, "Fourier base period (s/m/h/d/w suffix)")->capture_default_str();
    score_cmd->add_option("--bins", sc.bins, "Frequency bins")->capture_default_str();
    score_cmd->add_option("--qid", sc.qid, "Idle observer fraction")->capture_default_str();
    score_cmd->add_option("--seed", sc.seed, "RNG seed")->capture_default_str();
    score_cmd->add_option("--distance", sc.distance, "euclidean, manhattan or chebyshev")->capture_default_str();
    score_cmd->add_option("--ensemble", sc.ensemble, "Ensemble size")->capture_default_str()->check(CLI::PositiveNumber);
    score_cmd->add_option("--model-out", sc.model_out, "Write the model snapshot here");
    score_cmd->add_option("--checkpoint-every", sc.checkpoint_every, "Snapshot interval in stream time");
    score_cmd->add_option("--window", sc.window, "SW-kNN window length")->capture_default_str();
    score_cmd->add_option("--knn", sc.knn, "SW-kNN neighbor rank")->capture_default_str();
    score_cmd->add_option("--in", sc.in, "Input stream CSV (default stdin)");
    score_cmd->add_option("--out", sc.out, "Output score CSV (default stdout)");

    EvalOptions ev;
    auto* eval_cmd = app.add_subcommand("eval", "Compute AUC, AAP and AP@n");
    eval_cmd->add_option("--scores", ev.scores, "Score CSV")->required();
    eval_cmd->add_option("--labels", ev.labels, "Labeled stream CSV")->required();
    eval_cmd->add_flag("--drop-warmup", ev.drop_warmup, "Ignore warm-up records");
    eval_cmd->add_flag("--by-class", ev.by_class, "Also report spatial and contextual outliers separately");
    eval_cmd->add_option("--from", ev.from, "Ignore records before this stream time (burn-in)");
    eval_cmd->add_option("--out", ev.out, "Metrics CSV");

    InspectOptions in;
    auto* inspect_cmd = app.add_subcommand("inspect", "Export model internals as CSV");
    inspect_cmd->add_option("--model", in.model, "Model snapshot");
    inspect_cmd->add_option("--member", in.member, "Ensemble member")->capture_default_str();
    inspect_cmd->add_flag("--spectrum", in.spectrum, "Magnitude spectrum per observer");
    inspect_cmd->add_flag("--shape", in.shape, "Temporal shape per observer");
    inspect_cmd->add_flag("--observers", in.observers, "Observer table");
    inspect_cmd->add_option("--sampling-log", in.sampling_log, "Score CSV to bin sampling events from");
    inspect_cmd->add_option("--horizon", in.horizon, "Shape horizon (default T0)");
    inspect_cmd->add_option("--samples", in.samples, "Shape samples")->capture_default_str();
    inspect_cmd->add_option("--top", in.top, "Only the N observers with the largest mass");
    inspect_cmd->add_option("--interval", in.interval, "Sampling-log bin width")->capture_default_str();
    inspect_cmd->add_option("--out", in.out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (gen_cmd->parsed())
            return run_gen(gen);
        if (score_cmd->parsed())
            return run_score(sc);
        if (eval_cmd->parsed())
            return run_eval(ev);
        if (inspect_cmd->parsed())
            return run_inspect(in);
    } catch (const InvalidParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const io::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return parse;
    } catch (const SnapshotError& e) {
        std::cerr << "snapshot error: " << e.what() << '\n';
        return parse;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return data;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return io_error;
    }
    return usage;
}
