#pragma once

#include <charconv>
#include <string>
#include <system_error>

#include <json.hpp>

#include "svi/collocation.hpp"

namespace svi {

/// Locale-independent decimal rendering with 17 significant digits,
/// enough to reproduce any double exactly on re-read.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace detail {

inline nlohmann::json to_json(const mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline mat mat_from_json(const nlohmann::json& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.at(0).size();
    mat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows.at(i).at(j).get<double>();
    return m;
}

}  // namespace detail

inline nlohmann::json tableau_to_json(const tableau& t) {
    nlohmann::json j;
    j["kind"] = std::string(to_string(t.kind));
    j["s"] = t.s;
    j["c"] = t.c;
    j["b"] = t.b;
    j["a"] = detail::to_json(t.a);
    j["abar"] = detail::to_json(t.abar);
    j["bbar"] = t.bbar;
    j["dmat"] = detail::to_json(t.dmat);
    j["alpha"] = t.alpha;
    j["beta"] = t.beta;
    j["gamma"] = t.gamma;
    return j;
}

inline tableau tableau_from_json(const nlohmann::json& j) {
    tableau t;
    t.kind = quadrature_from_string(j.at("kind").get<std::string>());
    t.s = j.at("s").get<std::size_t>();
    t.c = j.at("c").get<vec>();
    t.b = j.at("b").get<vec>();
    t.a = detail::mat_from_json(j.at("a"));
    t.abar = detail::mat_from_json(j.at("abar"));
    t.bbar = j.at("bbar").get<vec>();
    t.dmat = detail::mat_from_json(j.at("dmat"));
    t.alpha = j.at("alpha").get<vec>();
    t.beta = j.at("beta").get<vec>();
    t.gamma = j.at("gamma").get<double>();
    return t;
}

}  // namespace svi
