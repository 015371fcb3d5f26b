#pragma once

// JSON exchange: matrices as {"rows", "cols", "re", "im"} in row-major order,
// group elements with "family", "p", "q", and surface representations.

#include <fstream>
#include <string>

#include <json.hpp>

#include "surface.hpp"

namespace toledo {

using json = nlohmann::json;

struct ParseError : Error {
    using Error::Error;
};

inline json matrix_to_json(const Mat& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

inline Mat matrix_from_json(const json& j) {
    try {
        const auto rows = j.at("rows").get<Eigen::Index>();
        const auto cols = j.at("cols").get<Eigen::Index>();
        if (rows < 0 || cols < 0) throw ParseError("matrix: negative shape");
        const auto& re = j.at("re");
        const size_t n = static_cast<size_t>(rows * cols);
        if (!re.is_array() || re.size() != n) throw ParseError("matrix: \"re\" has the wrong length");
        const bool has_im = j.contains("im");
        if (has_im && (!j["im"].is_array() || j["im"].size() != n)) throw ParseError("matrix: \"im\" has the wrong length");
        Mat m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index k = 0; k < cols; ++k) {
                size_t idx = static_cast<size_t>(i * cols + k);
                m(i, k) = cplx(re[idx].get<double>(), has_im ? j["im"][idx].get<double>() : 0.0);
            }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("matrix: ") + e.what());
    }
}

inline json element_to_json(const GroupElement& g) {
    json j = matrix_to_json(g.native);
    j["family"] = family_name(g.family);
    j["p"] = g.p;
    j["q"] = g.q;
    return j;
}

// Metadata in the document wins over the fallbacks; p, q follow the family
// conventions of make_element.
struct ElementSpec {
    Family family = Family::U;
    int p = 0;
    int q = 0;
    Mat native;
};

inline ElementSpec element_spec_from_json(const json& j, std::optional<Family> family = {}, std::optional<int> p = {},
                                          std::optional<int> q = {}) {
    ElementSpec s;
    s.native = matrix_from_json(j);
    try {
        if (j.contains("family")) s.family = parse_family(j["family"].get<std::string>());
        else if (family) s.family = *family;
        if (j.contains("p")) s.p = j["p"].get<int>();
        else if (p) s.p = *p;
        if (j.contains("q")) s.q = j["q"].get<int>();
        else if (q) s.q = *q;
    } catch (const json::exception& e) {
        throw ParseError(std::string("element: ") + e.what());
    }
    const int n = static_cast<int>(s.native.rows());
    if (!j.contains("p") && !p) {
        if (s.family == Family::Sp || s.family == Family::SOstar) s.p = n / 2;
        else if (s.family == Family::SO0) s.p = n - 2;
        else s.p = n;
    }
    if (!j.contains("q") && !q) {
        if (s.family == Family::Sp || s.family == Family::SOstar) s.q = s.p;
        else if (s.family == Family::SO0) s.q = 2;
        else s.q = n - s.p;
    }
    return s;
}

inline GroupElement element_from_json(const json& j, const Tolerances& tol = {}, std::optional<Family> family = {},
                                      std::optional<int> p = {}, std::optional<int> q = {}) {
    ElementSpec s = element_spec_from_json(j, family, p, q);
    return make_element(s.family, s.native, s.p, s.q, tol.membership);
}

inline json representation_to_json(const SurfaceRepresentation& rep, bool omit_last = false) {
    json gens = json::object();
    for (int i = 0; i < rep.pres.genus; ++i) {
        gens["a" + std::to_string(i + 1)] = matrix_to_json(rep.a[i]);
        gens["b" + std::to_string(i + 1)] = matrix_to_json(rep.b[i]);
    }
    int nc = static_cast<int>(rep.c.size()) - (omit_last && !rep.c.empty() ? 1 : 0);
    for (int j = 0; j < nc; ++j) gens["c" + std::to_string(j + 1)] = matrix_to_json(rep.c[j]);
    return {{"genus", rep.pres.genus}, {"boundary", rep.pres.boundary}, {"family", family_name(rep.family)},
            {"p", rep.p}, {"q", rep.q}, {"generators", gens}};
}

inline SurfaceRepresentation representation_from_json(const json& j) {
    SurfaceRepresentation rep;
    try {
        rep.pres.genus = j.at("genus").get<int>();
        rep.pres.boundary = j.at("boundary").get<int>();
        rep.family = parse_family(j.at("family").get<std::string>());
        rep.p = j.at("p").get<int>();
        rep.q = j.at("q").get<int>();
        const auto& gens = j.at("generators");
        for (int i = 1; i <= rep.pres.genus; ++i) {
            rep.a.push_back(matrix_from_json(gens.at("a" + std::to_string(i))));
            rep.b.push_back(matrix_from_json(gens.at("b" + std::to_string(i))));
        }
        for (int k = 1; k <= rep.pres.boundary; ++k) {
            std::string key = "c" + std::to_string(k);
            if (gens.contains(key)) rep.c.push_back(matrix_from_json(gens[key]));
            else if (k != rep.pres.boundary) throw ParseError("representation: missing generator " + key);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("representation: ") + e.what());
    }
    if (rep.pres.genus < 0 || rep.pres.boundary < 0) throw ParseError("representation: negative counts");
    solve_last_boundary(rep);
    return rep;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace toledo
