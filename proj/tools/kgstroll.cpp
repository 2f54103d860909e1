// kgstroll: extract walks from an RDF graph, train token embeddings over
// them, and pull literal features along predicate paths.
//
//   kgstroll --input mutag.nt --entities ents.txt
//            --skip-predicate http://example.org/isMutagenic
//            --walker halk:depth=2
//            --walker random:depth=2,max=100,sampler=pagerank:alpha=0.85
//            --epochs 10 --out vectors.txt
//
// Exit codes: 0 success, 1 configuration error, 2 input/parse error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "kgstroll/errors.hpp"
#include "kgstroll/ntriples.hpp"
#include "kgstroll/sparql.hpp"
#include "kgstroll/transformer.hpp"

using namespace kgstroll;
using nlohmann::json;

namespace {

struct CliConfig {
    std::string input;
    std::string entities_file;
    std::string output_vectors = "vectors.txt";
    std::string output_literals;
    std::string dump_corpus_path;
    std::vector<std::string> walker_specs;
    std::vector<std::string> skip_predicates;
    std::vector<std::string> literal_path_specs;
    std::string mode = "skipgram";
    size_t dimension = 100;
    int window = 5;
    int negatives = 5;
    int epochs = 10;
    double initial_lr = 0.0;
    int min_count = 1;
    double subsample_t = 1e-3;
    size_t workers = 1;
    uint64_t seed = 42;
    bool lenient = false;
    bool canonical_corpus_order = false;
    size_t bundle_size = 64;
    size_t cache_capacity = 100000;
    bool print_config = false;
};

bool is_remote(const std::string& input) {
    return input.rfind("http://", 0) == 0 || input.rfind("https://", 0) == 0;
}

std::vector<std::pair<std::string, std::string>> split_key_values(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> kvs;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        std::string piece = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        size_t eq = piece.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value in walker spec near '" + piece + "'");
        kvs.emplace_back(piece.substr(0, eq), piece.substr(eq + 1));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return kvs;
}

SamplerSpec parse_sampler_spec(const std::string& text) {
    SamplerSpec spec;
    size_t colon = text.find(':');
    std::string name = text.substr(0, colon);
    if (name == "uniform")
        spec.strategy = SamplerStrategy::Uniform;
    else if (name == "predfreq")
        spec.strategy = SamplerStrategy::PredFreq;
    else if (name == "objfreq")
        spec.strategy = SamplerStrategy::ObjFreq;
    else if (name == "predobjfreq")
        spec.strategy = SamplerStrategy::PredObjFreq;
    else if (name == "pagerank")
        spec.strategy = SamplerStrategy::PageRank;
    else
        throw ConfigError("unknown sampler: " + name);

    if (colon == std::string::npos) return spec;
    // Sampler parameters are colon-separated so they never collide with the
    // comma-separated walker keys: pagerank:alpha=0.85:inverse=true
    std::string rest = text.substr(colon + 1);
    size_t pos = 0;
    while (pos < rest.size()) {
        size_t next = rest.find(':', pos);
        std::string piece = rest.substr(pos, next == std::string::npos ? next : next - pos);
        size_t eq = piece.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value in sampler spec near '" + piece + "'");
        std::string key = piece.substr(0, eq);
        std::string value = piece.substr(eq + 1);
        if (key == "alpha")
            spec.alpha = std::stod(value);
        else if (key == "inverse")
            spec.inverse = value == "true" || value == "1";
        else
            throw ConfigError("unknown sampler key: " + key);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
        throw ConfigError("pagerank alpha must lie in (0, 1)");
    return spec;
}

WalkerSpec parse_walker_spec(const std::string& text, uint64_t default_seed) {
    WalkerSpec spec;
    spec.config.seed = default_seed;

    size_t colon = text.find(':');
    std::string name = text.substr(0, colon);
    if (name == "random")
        spec.config.strategy = WalkStrategy::Random;
    else if (name == "wl")
        spec.config.strategy = WalkStrategy::WL;
    else if (name == "halk")
        spec.config.strategy = WalkStrategy::HALK;
    else
        throw ConfigError("unknown walker: " + name);

    if (colon == std::string::npos) return spec;
    for (auto& [key, value] : split_key_values(text.substr(colon + 1))) {
        try {
            if (key == "depth")
                spec.config.max_depth = std::stoul(value);
            else if (key == "max")
                spec.config.max_walks = value == "none"
                                            ? std::optional<size_t>{}
                                            : std::optional<size_t>{std::stoul(value)};
            else if (key == "reverse")
                spec.config.with_reverse = value == "true" || value == "1";
            else if (key == "seed")
                spec.config.seed = std::stoull(value);
            else if (key == "iterations")
                spec.config.wl_iterations = std::stoul(value);
            else if (key == "threshold")
                spec.config.halk_threshold = std::stod(value);
            else if (key == "sampler")
                spec.sampler = parse_sampler_spec(value);
            else
                throw ConfigError("unknown walker key: " + key);
        } catch (const std::invalid_argument&) {
            throw ConfigError("bad value for walker key " + key + ": " + value);
        } catch (const std::out_of_range&) {
            throw ConfigError("bad value for walker key " + key + ": " + value);
        }
    }
    if (spec.config.max_walks && *spec.config.max_walks == 0)
        throw ConfigError("max walks must be positive (use max=none for exhaustive)");
    return spec;
}

std::vector<Term> read_entities(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open entities file: " + path);
    std::vector<Term> seeds;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line = line.substr(start);
        if (line[0] == '#') continue;
        if (line.front() == '<' && line.back() == '>') line = line.substr(1, line.size() - 2);
        seeds.push_back(Term::iri(line));
    }
    return seeds;
}

json literal_value_json(const LiteralValue& v) {
    if (v.numeric) return v.number;
    return v.text;
}

json literal_result_json(const LiteralResult& r) {
    switch (r.kind) {
        case LiteralResult::Kind::Missing: return nullptr;
        case LiteralResult::Kind::Single: return literal_value_json(r.values[0]);
        case LiteralResult::Kind::Many: {
            json arr = json::array();
            for (const auto& v : r.values) arr.push_back(literal_value_json(v));
            return arr;
        }
    }
    return nullptr;
}

void write_literals_json(const std::string& path, const Entities& seeds,
                         const std::vector<LiteralPath>& paths,
                         const std::vector<std::vector<LiteralResult>>& matrix) {
    json doc;
    doc["columns"] = json::array();
    for (const auto& p : paths) doc["columns"].push_back(p.joined());
    doc["rows"] = json::array();
    for (size_t s = 0; s < seeds.seeds.size(); ++s) {
        json row;
        row["entity"] = seeds.seeds[s].lexical;
        row["values"] = json::array();
        for (const auto& r : matrix[s]) row["values"].push_back(literal_result_json(r));
        doc["rows"].push_back(std::move(row));
    }
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot write literals file: " + path);
    out << doc.dump(2) << "\n";
}

void dump_corpus(const std::string& path, const FitResult& result) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot write corpus dump: " + path);
    for (size_t i = 0; i < result.corpus.size(); ++i) {
        out << result.corpus_strategy[i] << "\t" << result.corpus[i].root << "\t";
        const auto& tokens = result.corpus[i].tokens;
        for (size_t t = 0; t < tokens.size(); ++t) {
            if (t) out << " ";
            out << tokens[t];
        }
        out << "\n";
    }
}

int run_pipeline(const CliConfig& cli) {
    auto log = [](const std::string& line) { std::cerr << line << "\n"; };

    Entities seeds{read_entities(cli.entities_file)};
    if (seeds.seeds.empty()) throw ConfigError("entities file lists no IRIs");
    log("event=start input=" + cli.input + " entities=" + std::to_string(seeds.seeds.size()));

    PipelineConfig cfg;
    cfg.workers = cli.workers;
    cfg.canonical_corpus_order = cli.canonical_corpus_order;
    cfg.log = log;
    for (const auto& spec : cli.walker_specs)
        if (!spec.empty()) cfg.walkers.push_back(parse_walker_spec(spec, cli.seed));
    if (cfg.walkers.empty()) cfg.walkers.push_back(parse_walker_spec("random:depth=2", cli.seed));

    cfg.embedder.mode = cli.mode == "cbow" ? EmbeddingMode::CBOW : EmbeddingMode::SkipGram;
    cfg.embedder.dimension = cli.dimension;
    cfg.embedder.window = cli.window;
    cfg.embedder.negatives = cli.negatives;
    cfg.embedder.epochs = cli.epochs;
    cfg.embedder.initial_lr = cli.initial_lr;
    cfg.embedder.min_count = cli.min_count;
    cfg.embedder.subsample_t = cli.subsample_t;
    cfg.embedder.seed = cli.seed;
    cfg.embedder.workers = cli.workers;

    for (const auto& spec : cli.literal_path_specs) {
        if (spec.empty()) continue;
        LiteralPath path;
        size_t pos = 0;
        while (pos <= spec.size()) {
            size_t comma = spec.find(',', pos);
            std::string pred = spec.substr(pos, comma == std::string::npos ? comma : comma - pos);
            if (!pred.empty() && pred.front() == '<' && pred.back() == '>')
                pred = pred.substr(1, pred.size() - 2);
            if (!pred.empty()) path.predicates.push_back(pred);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (path.predicates.empty()) throw ConfigError("empty literal path: " + spec);
        cfg.literal_paths.push_back(std::move(path));
    }

    std::unordered_set<std::string> skip;
    for (const auto& p : cli.skip_predicates)
        if (!p.empty()) skip.insert(p);

    FitResult result;
    if (is_remote(cli.input)) {
        SparqlConnector connector(cli.input, {.cache_capacity = cli.cache_capacity,
                                              .bundle_size = cli.bundle_size});
        RemoteGraph remote(connector, skip);
        remote.prefetch(seeds.seeds, Direction::Forward);
        bool any_reverse = false;
        for (const auto& w : cfg.walkers) any_reverse |= w.config.with_reverse;
        if (any_reverse) remote.prefetch(seeds.seeds, Direction::Reverse);
        result = fit_transform(remote, seeds, cfg);
        auto stats = connector.cache_stats();
        log("event=connector hits=" + std::to_string(stats.hits) +
            " misses=" + std::to_string(stats.misses));
    } else {
        std::ifstream in(cli.input, std::ios::binary);
        if (!in) throw std::ios_base::failure("cannot open input file: " + cli.input);
        auto parsed = ntriples::parse(in, {.lenient = cli.lenient});
        if (parsed.skipped > 0)
            log("event=parse skipped_lines=" + std::to_string(parsed.skipped));
        KnowledgeGraph g = KnowledgeGraph::build(parsed.triples, skip);
        log("event=graph triples=" + std::to_string(parsed.triples.size()) +
            " vertices=" + std::to_string(g.vertex_count()) +
            " edges=" + std::to_string(g.walkable_edge_count()));
        result = fit_transform(g, seeds, cfg);
    }

    if (!result.missing.empty()) {
        std::string line = "event=missing_seeds count=" + std::to_string(result.missing.size());
        for (const Term& t : result.missing) line += " seed=" + t.lexical;
        log(line);
    }

    std::ofstream vectors_out(cli.output_vectors, std::ios::binary);
    if (!vectors_out)
        throw std::ios_base::failure("cannot write vectors file: " + cli.output_vectors);
    result.model.write_word2vec_text(vectors_out);
    log("event=vectors path=" + cli.output_vectors +
        " vocab=" + std::to_string(result.model.vocab().size()) +
        " dim=" + std::to_string(result.model.dimension()));

    if (!cfg.literal_paths.empty()) {
        std::string path = cli.output_literals.empty() ? "literals.json" : cli.output_literals;
        write_literals_json(path, seeds, cfg.literal_paths, result.literals);
        log("event=literals path=" + path + " rows=" + std::to_string(seeds.seeds.size()) +
            " cols=" + std::to_string(cfg.literal_paths.size()));
    }

    if (!cli.dump_corpus_path.empty()) {
        dump_corpus(cli.dump_corpus_path, result);
        log("event=corpus_dump path=" + cli.dump_corpus_path);
    }

    log("event=done walks=" + std::to_string(result.stats.walks_total) +
        " embedded_seeds=" + std::to_string(result.embeddings.size()));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RDF knowledge-graph walks, embeddings, and literal extraction"};
    app.get_formatter()->column_width(34);

    CliConfig cli;
    app.set_config("--config", "", "TOML config file (same keys as the flags)");
    app.add_option("--input", cli.input, "N-Triples file or SPARQL endpoint URL")->required();
    app.add_option("--entities", cli.entities_file, "file with one seed IRI per line")->required();
    app.add_option("--out,-o", cli.output_vectors, "vectors output path (word2vec text format)")
        ->capture_default_str();
    app.add_option("--out-literals", cli.output_literals,
                   "literal table output path (JSON, default literals.json)");
    app.add_option("--dump-corpus", cli.dump_corpus_path,
                   "write extracted walks as <strategy>TAB<root>TAB<tokens...>");
    app.add_option("--walker", cli.walker_specs,
                   "walker spec name:key=value,... e.g. random:depth=2,max=100,"
                   "sampler=pagerank:alpha=0.85 (repeatable; default random:depth=2)");
    app.add_option("--skip-predicate", cli.skip_predicates,
                   "predicate IRI excluded from the graph (repeatable)");
    app.add_option("--literal-path", cli.literal_path_specs,
                   "comma-separated predicate IRIs to a literal (repeatable)");
    app.add_option("--mode", cli.mode, "embedding objective")
        ->check(CLI::IsMember({"skipgram", "cbow"}))
        ->capture_default_str();
    app.add_option("--dim", cli.dimension, "embedding dimension")->capture_default_str();
    app.add_option("--window", cli.window, "maximum context window")->capture_default_str();
    app.add_option("--negatives", cli.negatives, "negative samples per pair")
        ->capture_default_str();
    app.add_option("--epochs", cli.epochs, "training epochs")->capture_default_str();
    app.add_option("--lr", cli.initial_lr, "initial learning rate (0 = per-mode default)")
        ->capture_default_str();
    app.add_option("--min-count", cli.min_count, "minimum token count kept in the vocabulary")
        ->capture_default_str();
    app.add_option("--subsample", cli.subsample_t, "frequent-token subsampling threshold")
        ->capture_default_str();
    app.add_option("--workers", cli.workers, "walk-extraction and training pool width")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", cli.seed, "random seed")->capture_default_str();
    app.add_flag("--lenient", cli.lenient, "skip malformed N-Triples lines instead of aborting");
    app.add_flag("--canonical-corpus-order", cli.canonical_corpus_order,
                 "sort the corpus before training");
    app.add_option("--bundle-size", cli.bundle_size, "subjects per bundled SPARQL request")
        ->capture_default_str();
    app.add_option("--cache-capacity", cli.cache_capacity, "connector cache entries")
        ->capture_default_str();
    app.add_flag("--print-config", cli.print_config,
                 "print the parsed configuration as TOML and exit")
        ->configurable(false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    if (cli.print_config) {
        std::cout << app.config_to_str(true, false);
        return 0;
    }

    try {
        return run_pipeline(cli);
    } catch (const ParseError& e) {
        std::cerr << "error: malformed input: " << e.what() << "\n";
        return 2;
    } catch (const ConnectorError& e) {
        std::cerr << "error: endpoint failure: " << e.what() << "\n";
        return 2;
    } catch (const DecodeError& e) {
        std::cerr << "error: bad endpoint response: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const TrainingDivergedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
