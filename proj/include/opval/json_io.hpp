#pragma once

// JSON model files and reports.
//
// Conventions: complex rationals are [re_num, re_den, im_num, im_den]
// quadruples; linear maps are row-major matrices of quadruples; traces are
// arrays of [num, den] pairs; automorphisms are 0-indexed permutation
// arrays. A model file carries "algebra" plus one of "circular", "rdiag" or
// a "maps" family block. Builtin model names resolve without a file.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "opval/algebra.hpp"
#include "opval/circular.hpp"
#include "opval/map_family.hpp"
#include "opval/rdiag.hpp"

namespace opval {

using njson = nlohmann::ordered_json;

struct json_error : std::runtime_error {
    explicit json_error(const std::string& what) : std::runtime_error(what) {}
};

namespace io {

inline njson rational_to_json(const rational& r) {
    const bigint num = numerator(r), den = denominator(r);
    static const bigint lim = bigint(1) << 62;
    if (abs(num) < lim && den < lim)
        return njson::array({num.convert_to<long long>(), den.convert_to<long long>()});
    return njson::array({num.str(), den.str()});
}

inline bigint bigint_from_json(const njson& j) {
    if (j.is_number_integer()) return bigint(j.get<long long>());
    if (j.is_string()) return bigint(j.get<std::string>());
    throw json_error("expected integer or integer string, got " + j.dump());
}

inline rational rational_from_pair(const njson& num, const njson& den) {
    bigint d = bigint_from_json(den);
    if (d == 0) throw json_error("zero denominator");
    return rational(bigint_from_json(num), d);
}

inline njson crational_to_json(const crational& c) {
    auto re = rational_to_json(c.re), im = rational_to_json(c.im);
    return njson::array({re[0], re[1], im[0], im[1]});
}

inline crational crational_from_json(const njson& j) {
    if (!j.is_array()) throw json_error("expected quadruple, got " + j.dump());
    if (j.size() == 2) return crational(rational_from_pair(j[0], j[1]));
    if (j.size() != 4) throw json_error("expected [re_num, re_den, im_num, im_den]");
    return crational(rational_from_pair(j[0], j[1]), rational_from_pair(j[2], j[3]));
}

inline njson elem_to_json(const alg_elem& e) {
    njson a = njson::array();
    for (int i = 0; i < e.dim(); ++i) a.push_back(crational_to_json(e[i]));
    return a;
}

inline alg_elem elem_from_json(const njson& j, int dim) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw json_error("element has wrong dimension");
    std::vector<crational> c;
    for (const auto& q : j) c.push_back(crational_from_json(q));
    return alg_elem(std::move(c));
}

inline njson linear_map_to_json(const linear_map& m) {
    njson rows = njson::array();
    for (int i = 0; i < m.dim(); ++i) {
        njson row = njson::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(crational_to_json(m.at(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline linear_map linear_map_from_json(const njson& j, int dim) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim) throw json_error("matrix rows mismatch");
    linear_map m(dim);
    for (int r = 0; r < dim; ++r) {
        const auto& row = j[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw json_error("matrix columns mismatch");
        for (int c = 0; c < dim; ++c) m.at(r, c) = crational_from_json(row[static_cast<size_t>(c)]);
    }
    return m;
}

inline njson trace_to_json(const trace_functional& t) {
    njson a = njson::array();
    for (const auto& w : t.weights) a.push_back(rational_to_json(w));
    return a;
}

inline trace_functional trace_from_json(const njson& j) {
    if (!j.is_array() || j.empty()) throw json_error("trace weights must be a nonempty array");
    std::vector<rational> w;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2) throw json_error("trace weight must be [num, den]");
        w.push_back(rational_from_pair(p[0], p[1]));
    }
    return trace_functional(std::move(w));
}

inline njson tensor_to_json(const ctensor& t) {
    njson a = njson::array();
    for (size_t i = 0; i < t.size(); ++i) a.push_back(crational_to_json(t.flat_at(i)));
    return a;
}

inline ctensor tensor_from_json(const njson& j, int dim, int order) {
    ctensor t(dim, order);
    if (!j.is_array() || j.size() != t.size()) throw json_error("tensor entry count mismatch");
    for (size_t i = 0; i < t.size(); ++i) t.flat_at(i) = crational_from_json(j[i]);
    return t;
}

}  // namespace io

inline njson family_to_json(const map_family& f) {
    njson j;
    j["algebra"] = {{"dimension", f.alg().dimension}};
    j["labels"] = f.labels();
    j["kind"] = f.kind() == family_kind::cumulants ? "cumulants" : "moments";
    j["max_order"] = f.max_order();
    j["sparse"] = f.sparse();
    njson maps = njson::array();
    for (const auto& [w, t] : f.maps()) {
        njson entry;
        njson labels = njson::array();
        for (int v : w) labels.push_back(f.labels()[static_cast<size_t>(v)]);
        entry["word"] = labels;
        entry["tensor"] = io::tensor_to_json(t);
        maps.push_back(entry);
    }
    j["maps"] = maps;
    return j;
}

inline map_family family_from_json(const njson& j) {
    if (!j.contains("algebra") || !j["algebra"].contains("dimension"))
        throw json_error("missing algebra.dimension");
    const int dim = j["algebra"]["dimension"].get<int>();
    if (dim < 1) throw json_error("dimension must be >= 1");
    std::vector<std::string> labels = j.at("labels").get<std::vector<std::string>>();
    const std::string kind_s = j.at("kind").get<std::string>();
    family_kind kind;
    if (kind_s == "cumulants") kind = family_kind::cumulants;
    else if (kind_s == "moments") kind = family_kind::moments;
    else throw json_error("kind must be 'moments' or 'cumulants'");
    int max_order = j.value("max_order", 8);
    const bool sparse = j.value("sparse", true);
    map_family f(algebra(dim), labels, kind, max_order, sparse);
    for (const auto& entry : j.at("maps")) {
        word w;
        for (const auto& ls : entry.at("word")) {
            const std::string l = ls.get<std::string>();
            auto it = std::find(labels.begin(), labels.end(), l);
            if (it == labels.end()) throw json_error("unknown label '" + l + "'");
            w.push_back(static_cast<int>(it - labels.begin()));
        }
        f.set_map(w, io::tensor_from_json(entry.at("tensor"), dim, static_cast<int>(w.size())));
    }
    return f;
}

inline njson circular_to_json(const circular_model& m) {
    njson j;
    j["algebra"] = {{"dimension", m.alg.dimension}};
    j["circular"] = {{"eta1", io::linear_map_to_json(m.eta1)},
                     {"eta2", io::linear_map_to_json(m.eta2)}};
    return j;
}

inline circular_model circular_from_json(const njson& j) {
    const int dim = j.at("algebra").at("dimension").get<int>();
    const auto& c = j.at("circular");
    return circular_model(algebra(dim), io::linear_map_from_json(c.at("eta1"), dim),
                          io::linear_map_from_json(c.at("eta2"), dim));
}

inline rdiag_model rdiag_from_json(const njson& j) {
    const int dim = j.at("algebra").at("dimension").get<int>();
    std::vector<std::pair<ctensor, ctensor>> betas;
    int k = 1;
    for (const auto& entry : j.at("rdiag").at("betas")) {
        betas.emplace_back(io::tensor_from_json(entry.at("beta1"), dim, 2 * k),
                           io::tensor_from_json(entry.at("beta2"), dim, 2 * k));
        ++k;
    }
    return rdiag_model(algebra(dim), std::move(betas));
}

// any of the model kinds a CLI command may accept
using any_model = std::variant<circular_model, rdiag_model, map_family>;

// resolves "nofreepolar", "dt:<d>", "scalar-circular:<c>" (optionally with a
// "builtin:" prefix) or a JSON file path
inline any_model resolve_model(const std::string& spec) {
    std::string name = spec;
    if (name.rfind("builtin:", 0) == 0) name = name.substr(8);
    if (name == "nofreepolar") return make_nofreepolar();
    if (name.rfind("dt:", 0) == 0) {
        const int d = std::stoi(name.substr(3));
        if (d < 1) throw json_error("dt:<d> needs d >= 1");
        return make_dt_discretized(d);
    }
    if (name.rfind("scalar-circular:", 0) == 0)
        return make_scalar_circular(crational(parse_rational(name.substr(16))));

    std::ifstream in(spec);
    if (!in) throw json_error("cannot open model file '" + spec + "'");
    njson j;
    try {
        j = njson::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw json_error("malformed JSON in '" + spec + "': " + e.what());
    }
    if (j.contains("circular")) return circular_from_json(j);
    if (j.contains("rdiag")) return rdiag_from_json(j);
    if (j.contains("maps")) return family_from_json(j);
    throw json_error("model file has none of 'circular', 'rdiag', 'maps'");
}

// deterministic report skeleton; timings are opt-in so that identical
// invocations stay byte-identical
inline njson make_report(const std::string& command, njson parameters, njson verdicts,
                         njson counterexamples = njson::array()) {
    njson r;
    r["command"] = command;
    r["parameters"] = std::move(parameters);
    r["verdicts"] = std::move(verdicts);
    r["counterexamples"] = std::move(counterexamples);
    return r;
}

}  // namespace opval
