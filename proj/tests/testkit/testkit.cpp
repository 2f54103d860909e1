#include "testkit.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <map>
#include <thread>

namespace testkit {

namespace {

using nlohmann::json;

void enumerate_segments_rec(const KnowledgeGraph& g, const Term& vertex, Direction dir,
                            size_t remaining, std::vector<std::string>& prefix,
                            std::set<std::vector<std::string>>& out) {
    out.insert(prefix);
    if (remaining == 0) return;
    for (const kgstroll::Hop& h : g.hops(vertex, dir)) {
        prefix.push_back(h.predicate.token());
        prefix.push_back(h.neighbor.token());
        enumerate_segments_rec(g, h.neighbor, dir, remaining - 1, prefix, out);
        prefix.pop_back();
        prefix.pop_back();
    }
}

std::set<std::vector<std::string>> segments(const KnowledgeGraph& g, const Term& seed,
                                            Direction dir, size_t depth) {
    std::set<std::vector<std::string>> out;
    std::vector<std::string> prefix;
    enumerate_segments_rec(g, seed, dir, depth, prefix, out);
    return out;
}

}  // namespace

std::set<std::vector<std::string>> oracle_enumerate_walks(const KnowledgeGraph& g,
                                                          const Term& seed, size_t depth,
                                                          bool with_reverse) {
    std::set<std::vector<std::string>> walks;
    const std::string root = seed.token();
    auto forward = segments(g, seed, Direction::Forward, depth);
    if (!with_reverse) {
        for (const auto& f : forward) {
            std::vector<std::string> w{root};
            w.insert(w.end(), f.begin(), f.end());
            walks.insert(std::move(w));
        }
        return walks;
    }
    auto reverse = segments(g, seed, Direction::Reverse, depth);
    for (const auto& r : reverse) {
        // Reverse segments run root-outward as (predicate, vertex) pairs;
        // flip them so the walk reads source-to-root.
        std::vector<std::string> head;
        for (size_t pair = r.size() / 2; pair-- > 0;) {
            head.push_back(r[2 * pair + 1]);
            head.push_back(r[2 * pair]);
        }
        for (const auto& f : forward) {
            std::vector<std::string> w = head;
            w.push_back(root);
            w.insert(w.end(), f.begin(), f.end());
            walks.insert(std::move(w));
        }
    }
    return walks;
}

std::vector<double> oracle_pagerank(const KnowledgeGraph& g, double alpha, int iters) {
    const size_t n = g.vertex_count();
    std::vector<double> score(n, 1.0 / double(n));
    std::vector<size_t> outdeg(n);
    for (uint32_t v = 0; v < n; ++v) outdeg[v] = g.forward_of(v).size();

    for (int it = 0; it < iters; ++it) {
        std::vector<double> next(n, 0.0);
        double dangling = 0.0;
        for (uint32_t v = 0; v < n; ++v)
            if (outdeg[v] == 0) dangling += score[v];
        for (uint32_t v = 0; v < n; ++v) {
            if (outdeg[v] == 0) continue;
            double share = score[v] / double(outdeg[v]);
            for (const kgstroll::InternedHop& h : g.forward_of(v)) next[h.neighbor] += share;
        }
        for (size_t v = 0; v < n; ++v)
            next[v] = (1.0 - alpha) / double(n) + alpha * (next[v] + dangling / double(n));
        score = std::move(next);
    }
    return score;
}

// Regularized incomplete gamma, series + continued fraction split at x = a+1.
double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) return 1.0;
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a, x) by series, Q = 1 - P
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - gln);
        return 1.0 - p;
    }
    // Q(a, x) by Lentz continued fraction
    double b = x + 1.0 - a;
    double c = 1e300;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

double chi_square_pvalue(double statistic, int dof) {
    return gamma_q(double(dof) / 2.0, statistic / 2.0);
}

namespace {

double oracle_log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

double oracle_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double oracle_skipgram_loss(const std::vector<double>& center, const std::vector<double>& positive,
                            const std::vector<std::vector<double>>& negatives) {
    double loss = -oracle_log_sigmoid(oracle_dot(positive, center));
    for (const auto& n : negatives) loss -= oracle_log_sigmoid(-oracle_dot(n, center));
    return loss;
}

double oracle_cbow_loss(const std::vector<std::vector<double>>& contexts,
                        const std::vector<double>& positive,
                        const std::vector<std::vector<double>>& negatives) {
    std::vector<double> h(positive.size(), 0.0);
    for (const auto& c : contexts)
        for (size_t i = 0; i < h.size(); ++i) h[i] += c[i];
    for (double& x : h) x /= double(contexts.size());
    return oracle_skipgram_loss(h, positive, negatives);
}

std::vector<Triple> random_graph(const RandomGraphSpec& spec) {
    kgstroll::RandomSource rng(spec.seed, 7);
    std::vector<Triple> triples;
    triples.reserve(spec.edges);
    auto vertex = [&](uint64_t i) { return Term::iri("http://t/v" + std::to_string(i)); };
    auto predicate = [&](uint64_t i) { return Term::iri("http://t/p" + std::to_string(i)); };
    for (size_t e = 0; e < spec.edges; ++e) {
        Term s = vertex(rng.next_below(spec.vertices));
        Term p = predicate(rng.next_below(spec.predicate_alphabet));
        if (rng.next_double() < spec.literal_fraction) {
            triples.push_back({s, p, Term::literal("lit" + std::to_string(rng.next_below(50)))});
        } else {
            triples.push_back({s, p, vertex(rng.next_below(spec.vertices))});
        }
    }
    return triples;
}

std::vector<kgstroll::Walk> planted_pair_corpus(size_t sentences, uint64_t seed) {
    kgstroll::RandomSource rng(seed, 3);
    std::vector<kgstroll::Walk> walks;
    for (size_t s = 0; s < sentences; ++s) {
        std::vector<std::string> tokens;
        const size_t len = 8;
        bool plant = s % 3 == 0;
        size_t cluster = plant ? 30 : rng.next_below(30);
        size_t plant_at = rng.next_below(len - 1);
        for (size_t i = 0; i < len; ++i) {
            if (plant && i == plant_at) {
                tokens.push_back("x");
                tokens.push_back("y");
                ++i;
            } else {
                tokens.push_back("filler" + std::to_string(cluster * 2 + rng.next_below(2)));
            }
        }
        walks.push_back({tokens[0], tokens});
    }
    return walks;
}

MutagGraph mutag_shaped_graph(size_t molecules, uint64_t seed) {
    MutagGraph g;
    g.ns = "http://dl-learner.org/carcinogenesis#";
    kgstroll::RandomSource rng(seed, 11);
    auto iri = [&](const std::string& local) { return Term::iri(g.ns + local); };

    const Term has_atom = iri("hasAtom");
    const Term charge = iri("charge");
    const Term has_bond = iri("hasBond");
    const Term in_bond = iri("inBond");
    const Term is_mutagenic = iri("isMutagenic");
    const Term bonds_with = iri("bondsWith");
    const Term element = iri("element");
    const std::vector<Term> elements = {iri("Carbon"), iri("Nitrogen"), iri("Oxygen")};

    for (size_t m = 0; m < molecules; ++m) {
        Term mol = iri("mol" + std::to_string(m));
        g.molecules.push_back(mol);
        g.triples.push_back({mol, is_mutagenic, Term::typed_literal(
            m % 2 ? "true" : "false", "http://www.w3.org/2001/XMLSchema#boolean")});

        // 2..5 atoms, each with a charge literal and an element link.
        size_t n_atoms = 2 + rng.next_below(4);
        std::vector<Term> atoms;
        for (size_t a = 0; a < n_atoms; ++a) {
            Term atom = iri("mol" + std::to_string(m) + "_atom" + std::to_string(a));
            atoms.push_back(atom);
            g.triples.push_back({mol, has_atom, atom});
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", rng.next_double() - 0.5);
            g.triples.push_back({atom, charge, Term::typed_literal(
                buf, "http://www.w3.org/2001/XMLSchema#double")});
            g.triples.push_back({atom, element, elements[rng.next_below(elements.size())]});
        }
        // Bond shapes drive the Missing / Single / Many literal cases:
        // molecule 0 has no bonds, molecule 1 exactly one, the rest several.
        size_t n_bonds = m == 0 ? 0 : (m == 1 ? 1 : 2 + rng.next_below(3));
        for (size_t b = 0; b < n_bonds; ++b) {
            Term bond = iri("mol" + std::to_string(m) + "_bond" + std::to_string(b));
            g.triples.push_back({mol, has_bond, bond});
            g.triples.push_back({bond, in_bond, Term::literal(
                "b" + std::to_string(rng.next_below(7)))});
            Term a1 = atoms[rng.next_below(atoms.size())];
            Term a2 = atoms[rng.next_below(atoms.size())];
            g.triples.push_back({a1, bonds_with, a2});
        }
    }
    return g;
}

// ---- stub server ------------------------------------------------------------

struct StubSparqlServer::Impl {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> requests{0};
    std::atomic<int> forced_status{0};

    // Adjacency keyed by IRI lexical form, insertion order preserved.
    std::map<std::string, std::vector<std::pair<Term, Term>>> forward;  // s -> (p, o)
    std::map<std::string, std::vector<std::pair<Term, Term>>> reverse;  // o -> (p, s)

    static json term_json(const Term& t) {
        json j;
        switch (t.kind) {
            case kgstroll::TermKind::IRI:
                j["type"] = "uri";
                j["value"] = t.lexical;
                break;
            case kgstroll::TermKind::BlankNode:
                j["type"] = "bnode";
                j["value"] = t.lexical;
                break;
            case kgstroll::TermKind::Literal:
                j["type"] = "literal";
                j["value"] = t.lexical;
                if (t.datatype_iri) j["datatype"] = *t.datatype_iri;
                if (t.language_tag) j["xml:lang"] = *t.language_tag;
                break;
        }
        return j;
    }

    static bool strip_prefix(std::string& s, const std::string& prefix) {
        if (s.rfind(prefix, 0) != 0) return false;
        s.erase(0, prefix.size());
        return true;
    }

    static std::vector<std::string> parse_iri_list(std::string& rest) {
        std::vector<std::string> iris;
        while (!rest.empty() && rest.front() == '<') {
            size_t end = rest.find('>');
            if (end == std::string::npos) break;
            iris.push_back(rest.substr(1, end - 1));
            rest.erase(0, end + 1);
            while (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
        }
        return iris;
    }

    void answer(const std::string& query, httplib::Response& res) {
        requests.fetch_add(1);
        if (int st = forced_status.load()) {
            res.status = st;
            return;
        }

        std::string q = query;
        json bindings = json::array();
        auto emit = [&](std::initializer_list<std::pair<const char*, const Term*>> vars) {
            json row;
            for (auto& [name, term] : vars) row[name] = term_json(*term);
            bindings.push_back(std::move(row));
        };

        if (std::string rest = q; strip_prefix(rest, "SELECT ?p ?o WHERE { <")) {
            size_t end = rest.find('>');
            std::string iri = rest.substr(0, end);
            auto it = forward.find(iri);
            if (it != forward.end())
                for (auto& [p, o] : it->second) emit({{"p", &p}, {"o", &o}});
        } else if (std::string rest = q; strip_prefix(rest, "SELECT ?p ?s WHERE { ?s ?p <")) {
            size_t end = rest.find('>');
            std::string iri = rest.substr(0, end);
            auto it = reverse.find(iri);
            if (it != reverse.end())
                for (auto& [p, s] : it->second) emit({{"p", &p}, {"s", &s}});
        } else if (std::string rest = q;
                   strip_prefix(rest, "SELECT ?s ?p ?o WHERE { VALUES ?s { ")) {
            for (const std::string& iri : parse_iri_list(rest)) {
                auto it = forward.find(iri);
                if (it == forward.end()) continue;
                Term s = Term::iri(iri);
                for (auto& [p, o] : it->second) emit({{"s", &s}, {"p", &p}, {"o", &o}});
            }
        } else if (std::string rest = q;
                   strip_prefix(rest, "SELECT ?o ?p ?s WHERE { VALUES ?o { ")) {
            for (const std::string& iri : parse_iri_list(rest)) {
                auto it = reverse.find(iri);
                if (it == reverse.end()) continue;
                Term o = Term::iri(iri);
                for (auto& [p, s] : it->second) emit({{"o", &o}, {"p", &p}, {"s", &s}});
            }
        } else {
            res.status = 400;
            res.set_content("unsupported query shape", "text/plain");
            return;
        }

        json doc;
        doc["head"]["vars"] = json::array({"s", "p", "o"});
        doc["results"]["bindings"] = std::move(bindings);
        res.set_content(doc.dump(), "application/sparql-results+json");
    }
};

StubSparqlServer::StubSparqlServer(std::vector<Triple> dataset) : impl_(new Impl) {
    for (const Triple& t : dataset) {
        if (t.subject.is_iri())
            impl_->forward[t.subject.lexical].push_back({t.predicate, t.object});
        if (t.object.is_iri())
            impl_->reverse[t.object.lexical].push_back({t.predicate, t.subject});
    }

    impl_->server.Get("/sparql", [this](const httplib::Request& req, httplib::Response& res) {
        impl_->answer(req.get_param_value("query"), res);
    });
    impl_->server.Post("/sparql", [this](const httplib::Request& req, httplib::Response& res) {
        impl_->answer(req.get_param_value("query"), res);
    });

    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

StubSparqlServer::~StubSparqlServer() {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::string StubSparqlServer::url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->port) + "/sparql";
}

int StubSparqlServer::request_count() const { return impl_->requests.load(); }

void StubSparqlServer::reset_request_count() { impl_->requests.store(0); }

void StubSparqlServer::force_status(int status) { impl_->forced_status.store(status); }

void StubSparqlServer::clear_forced_status() { impl_->forced_status.store(0); }

}  // namespace testkit
