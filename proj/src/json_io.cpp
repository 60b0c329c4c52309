#include "sublevel/json_io.hpp"

#include <sstream>

namespace sublevel {

using nlohmann::json;

HomogeneousPolynomial polynomial_from_json(const json& j) {
    if (!j.is_object()) throw parse_error("polynomial: expected a JSON object");
    if (!j.contains("n") || !j.contains("d") || !j.contains("terms"))
        throw parse_error("polynomial: missing one of n, d, terms");
    if (!j["n"].is_number_integer() || !j["d"].is_number_integer())
        throw parse_error("polynomial: n and d must be integers");
    const int n = j["n"].get<int>();
    const int d = j["d"].get<int>();
    if (!j["terms"].is_array()) throw parse_error("polynomial: terms must be an array");

    std::vector<HomogeneousPolynomial::Term> terms;
    for (const auto& t : j["terms"]) {
        if (!t.is_array() || t.size() != 2 || !t[0].is_array() || !t[1].is_number())
            throw parse_error("polynomial: each term must be [multi-index, coefficient]");
        HomogeneousPolynomial::MultiIndex mi;
        for (const auto& e : t[0]) {
            if (!e.is_number_integer()) throw parse_error("polynomial: exponents must be integers");
            mi.push_back(e.get<int>());
        }
        terms.push_back({mi, t[1].get<double>()});
    }

    HomogeneousPolynomial f(n, d, terms);
    if (f.is_zero()) throw parse_error("polynomial: the zero polynomial is not accepted");
    return f;
}

HomogeneousPolynomial parse_polynomial(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("polynomial: invalid JSON: ") + e.what());
    }
    return polynomial_from_json(j);
}

json polynomial_to_json(const HomogeneousPolynomial& f) {
    json terms = json::array();
    for (std::size_t t = 0; t < f.term_count(); ++t) {
        json mi = json::array();
        for (int v = 0; v < f.dimension(); ++v) mi.push_back(f.exponent(t, v));
        terms.push_back(json::array({mi, f.coefficient(t)}));
    }
    return json{{"n", f.dimension()}, {"d", f.degree()}, {"terms", terms}};
}

std::string serialize_polynomial(const HomogeneousPolynomial& f) {
    return polynomial_to_json(f).dump();
}

BlockStructure blocks_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw parse_error("blocks: expected a nonempty array");
    std::vector<BlockStructure::Block> blocks;
    for (const auto& b : j) {
        if (!b.is_object() || !b.contains("dims") || !b.contains("poly"))
            throw parse_error("blocks: each entry needs dims and poly");
        blocks.push_back({b["dims"].get<int>(), polynomial_from_json(b["poly"])});
    }
    return BlockStructure(std::move(blocks));
}

std::vector<Eigen::VectorXd> points_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw parse_error("points: expected a nonempty array");
    std::vector<Eigen::VectorXd> out;
    for (const auto& row : j) {
        if (!row.is_array() || row.empty()) throw parse_error("points: each point must be an array");
        Eigen::VectorXd x(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (!row[i].is_number()) throw parse_error("points: coordinates must be numbers");
            x[long(i)] = row[i].get<double>();
        }
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<Eigen::VectorXd> points_from_csv(const std::string& text) {
    std::vector<Eigen::VectorXd> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (...) {
                throw parse_error("points CSV: non-numeric cell '" + cell + "'");
            }
        }
        if (row.empty()) continue;
        Eigen::VectorXd x(long(row.size()));
        for (std::size_t i = 0; i < row.size(); ++i) x[long(i)] = row[i];
        out.push_back(std::move(x));
    }
    if (out.empty()) throw parse_error("points CSV: no rows");
    return out;
}

IntegerLatticeBasis lattice_from_json(const json& j) {
    if (!j.is_object() || !j.contains("basis"))
        throw parse_error("lattice: expected an object with a basis array");
    const auto& vecs = j["basis"];
    if (!vecs.is_array() || vecs.empty()) throw parse_error("lattice: basis must be nonempty");
    const std::size_t n = vecs[0].size();
    IntMatrix G(long(n), long(vecs.size()));
    for (std::size_t c = 0; c < vecs.size(); ++c) {
        if (!vecs[c].is_array() || vecs[c].size() != n)
            throw parse_error("lattice: basis vectors must share one length");
        for (std::size_t r = 0; r < n; ++r) {
            if (!vecs[c][r].is_number_integer())
                throw parse_error("lattice: basis entries must be integers");
            G(long(r), long(c)) = vecs[c][r].get<long long>();
        }
    }
    return IntegerLatticeBasis(G);
}

void constraints_from_json(const json& j, IntMatrix& A, IntVector& b) {
    if (!j.is_object() || !j.contains("A") || !j.contains("b"))
        throw parse_error("constraints: expected an object with A and b");
    const auto& rows = j["A"];
    if (!rows.is_array() || rows.empty()) throw parse_error("constraints: A must be nonempty");
    const std::size_t n = rows[0].size();
    A.resize(long(rows.size()), long(n));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!rows[r].is_array() || rows[r].size() != n)
            throw parse_error("constraints: ragged matrix A");
        for (std::size_t c = 0; c < n; ++c) A(long(r), long(c)) = rows[r][c].get<long long>();
    }
    const auto& rhs = j["b"];
    if (!rhs.is_array() || rhs.size() != rows.size())
        throw parse_error("constraints: b length must match A rows");
    b.resize(long(rhs.size()));
    for (std::size_t r = 0; r < rhs.size(); ++r) b[long(r)] = rhs[r].get<long long>();
}

json estimate_to_json(const Estimate& e) {
    return json{{"value", e.value},
                {"std_error", e.std_error},
                {"outer_samples", e.outer_samples},
                {"inner_samples", e.inner_samples}};
}

json count_report_to_json(const CountReport& r) {
    json comps = json::array();
    for (std::size_t j = 0; j < r.components.size(); ++j) {
        json c = estimate_to_json(r.components[j]);
        c["j"] = j;
        comps.push_back(c);
    }
    return json{{"alpha", r.alpha},
                {"count", r.count},
                {"main_term", estimate_to_json(r.main_term)},
                {"components", comps},
                {"error_bound", r.error_bound},
                {"ratio", r.ratio},
                {"bound_holds", r.bound_holds}};
}

} // namespace sublevel
