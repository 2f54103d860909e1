#include "kgstroll/sparql.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>

#include "kgstroll/errors.hpp"

namespace kgstroll {

namespace {

using nlohmann::json;

std::string cache_key(const Term& subject, Direction dir) {
    return (dir == Direction::Forward ? "f|" : "r|") + subject.lexical;
}

Term term_from_binding(const json& b) {
    if (!b.is_object() || !b.contains("type") || !b.contains("value"))
        throw DecodeError("binding is missing type/value");
    const std::string type = b.at("type").get<std::string>();
    std::string value = b.at("value").get<std::string>();
    if (type == "uri") return Term::iri(std::move(value));
    if (type == "bnode") return Term::blank(std::move(value));
    if (type == "literal" || type == "typed-literal") {
        if (b.contains("xml:lang"))
            return Term::lang_literal(std::move(value), b.at("xml:lang").get<std::string>());
        if (b.contains("datatype"))
            return Term::typed_literal(std::move(value), b.at("datatype").get<std::string>());
        return Term::literal(std::move(value));
    }
    throw DecodeError("unknown binding type: " + type);
}

std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size() * 3);
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(char(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

}  // namespace

SparqlConnector::SparqlConnector(std::string endpoint_url, ConnectorOptions opts)
    : endpoint_(std::move(endpoint_url)), opts_(opts), cache_(opts.cache_capacity) {
    size_t scheme = endpoint_.find("://");
    if (scheme == std::string::npos)
        throw ConfigError("endpoint URL needs a scheme: " + endpoint_);
    size_t slash = endpoint_.find('/', scheme + 3);
    if (slash == std::string::npos) {
        host_ = endpoint_;
        path_ = "/";
    } else {
        host_ = endpoint_.substr(0, slash);
        path_ = endpoint_.substr(slash);
    }
}

std::string SparqlConnector::run_query(const std::string& query, bool use_post) {
    httplib::Client client(host_);
    client.set_connection_timeout(opts_.timeout_seconds);
    client.set_read_timeout(opts_.timeout_seconds);

    httplib::Result res = [&] {
        if (use_post) {
            httplib::Headers headers{{"Accept", "application/sparql-results+json"}};
            return client.Post(path_, headers, "query=" + url_encode(query),
                               "application/x-www-form-urlencoded");
        }
        httplib::Headers headers{{"Accept", "application/sparql-results+json"}};
        return client.Get(path_ + "?query=" + url_encode(query), headers);
    }();

    if (!res)
        throw ConnectorError("endpoint unreachable: " + endpoint_ + " (" +
                                 httplib::to_string(res.error()) + ")",
                             0);
    if (res->status != 200)
        throw ConnectorError("endpoint returned HTTP " + std::to_string(res->status), res->status);
    return res->body;
}

std::vector<Hop> SparqlConnector::fetch_hops(const Term& subject, Direction dir) {
    const std::string key = cache_key(subject, dir);
    if (auto cached = cache_.get(key)) return *cached;

    std::string query;
    if (dir == Direction::Forward)
        query = "SELECT ?p ?o WHERE { <" + subject.lexical + "> ?p ?o }";
    else
        query = "SELECT ?p ?s WHERE { ?s ?p <" + subject.lexical + "> }";

    std::string body = run_query(query, /*use_post=*/false);
    json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw DecodeError("endpoint response is not JSON");

    std::vector<Hop> hops;
    try {
        const char* neighbor_var = dir == Direction::Forward ? "o" : "s";
        for (const json& row : doc.at("results").at("bindings")) {
            Hop h{term_from_binding(row.at("p")), term_from_binding(row.at(neighbor_var))};
            hops.push_back(std::move(h));
        }
    } catch (const json::exception& e) {
        throw DecodeError(std::string("malformed SPARQL results: ") + e.what());
    }
    cache_.put(key, hops);
    return hops;
}

std::unordered_map<Term, std::vector<Hop>, TermHash> SparqlConnector::fetch_hops_bundled(
    std::span<const Term> subjects, Direction dir) {
    std::unordered_map<Term, std::vector<Hop>, TermHash> result;
    std::vector<Term> uncached;
    for (const Term& s : subjects) {
        if (result.contains(s)) continue;
        if (auto cached = cache_.get(cache_key(s, dir)))
            result.emplace(s, std::move(*cached));
        else if (std::find(uncached.begin(), uncached.end(), s) == uncached.end())
            uncached.push_back(s);
    }

    for (size_t start = 0; start < uncached.size(); start += opts_.bundle_size) {
        size_t stop = std::min(uncached.size(), start + opts_.bundle_size);
        std::string values;
        for (size_t i = start; i < stop; ++i) values += "<" + uncached[i].lexical + "> ";

        std::string query;
        const char* key_var;
        const char* neighbor_var;
        if (dir == Direction::Forward) {
            query = "SELECT ?s ?p ?o WHERE { VALUES ?s { " + values + "} ?s ?p ?o }";
            key_var = "s";
            neighbor_var = "o";
        } else {
            query = "SELECT ?o ?p ?s WHERE { VALUES ?o { " + values + "} ?s ?p ?o }";
            key_var = "o";
            neighbor_var = "s";
        }

        std::string body = run_query(query, /*use_post=*/true);
        json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
        if (doc.is_discarded()) throw DecodeError("endpoint response is not JSON");

        std::unordered_map<Term, std::vector<Hop>, TermHash> batch;
        for (size_t i = start; i < stop; ++i) batch.emplace(uncached[i], std::vector<Hop>{});
        try {
            for (const json& row : doc.at("results").at("bindings")) {
                Term key = term_from_binding(row.at(key_var));
                Hop h{term_from_binding(row.at("p")), term_from_binding(row.at(neighbor_var))};
                auto it = batch.find(key);
                if (it == batch.end()) throw DecodeError("binding for un-requested vertex");
                it->second.push_back(std::move(h));
            }
        } catch (const json::exception& e) {
            throw DecodeError(std::string("malformed SPARQL results: ") + e.what());
        }

        for (size_t i = start; i < stop; ++i) {
            auto& hops = batch.at(uncached[i]);
            cache_.put(cache_key(uncached[i], dir), hops);
            result.emplace(uncached[i], std::move(hops));
        }
    }
    return result;
}

RemoteGraph::RemoteGraph(SparqlConnector& connector,
                         std::unordered_set<std::string> skip_predicates)
    : connector_(connector), skip_predicates_(std::move(skip_predicates)) {}

std::vector<Hop> RemoteGraph::hops(const Term& vertex, Direction dir) const {
    if (vertex.is_literal()) return {};
    std::vector<Hop> raw = connector_.fetch_hops(vertex, dir);
    std::vector<Hop> out;
    out.reserve(raw.size());
    for (Hop& h : raw) {
        if (h.neighbor.is_literal()) continue;
        if (skip_predicates_.contains(h.predicate.lexical)) continue;
        out.push_back(std::move(h));
    }
    return out;
}

std::vector<Term> RemoteGraph::literals(const Term& subject,
                                        const std::string& predicate_iri) const {
    if (subject.is_literal() || skip_predicates_.contains(predicate_iri)) return {};
    std::vector<Term> out;
    for (Hop& h : connector_.fetch_hops(subject, Direction::Forward))
        if (h.neighbor.is_literal() && h.predicate.lexical == predicate_iri)
            out.push_back(std::move(h.neighbor));
    return out;
}

bool RemoteGraph::has_vertex(const Term& vertex) const {
    if (vertex.is_literal()) return false;
    if (!connector_.fetch_hops(vertex, Direction::Forward).empty()) return true;
    return !connector_.fetch_hops(vertex, Direction::Reverse).empty();
}

void RemoteGraph::prefetch(std::span<const Term> vertices, Direction dir) const {
    if (!vertices.empty()) connector_.fetch_hops_bundled(vertices, dir);
}

}  // namespace kgstroll
