#pragma once

#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "dist.hpp"
#include "index.hpp"

namespace ncg {

using json = nlohmann::json;

struct DistSpec {
    std::string check;  // dolbeault | covariance | kernel
    int n = 1;
    cplx z0{};
    cplx shift{};
    std::optional<ConformalMap> map;
    Field phi;
};

struct AnomalySpec {
    std::string invertible;
    std::string gauge;  // empty: u~^-1 dzb u~
};

struct Scenario {
    std::string digest;
    GroupAction act = GroupAction::trivial();
    std::map<std::string, Element> elements;
    std::map<std::string, Element> idempotents;
    std::map<std::string, RelInvertible> invertibles;
    std::vector<std::array<std::string, 3>> todd;
    std::vector<AnomalySpec> anomaly;
    std::vector<DistSpec> dist;
    std::optional<std::vector<cplx>> group_cocycle;
    std::map<std::string, std::map<std::string, cplx>> expect;  // command -> name -> value
    double expect_tol = 1e-9;
    QuadratureSpec quad;
    int truncation = 2;
    PhiOptions phi;
};

namespace config {

// error carrying a json pointer to the offending node
inline parse_error at(const std::string& path, const std::string& what) {
    return parse_error(path + ": " + what);
}

inline const json& need(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw at(path, "missing key '" + key + "'");
    return j.at(key);
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw at(path, "expected a number");
    return j.get<double>();
}

inline cplx complex(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw at(path, "expected a number or [re, im]");
}

inline Region region(const json& j, const std::string& path) {
    if (j.contains("disk")) {
        const json& d = j["disk"];
        return Region::disk(complex(need(d, "center", path + "/disk"), path + "/disk/center"),
                            number(need(d, "radius", path + "/disk"), path + "/disk/radius"));
    }
    if (j.contains("rect")) {
        const json& d = j["rect"];
        return Region::rect(complex(need(d, "lo", path + "/rect"), path + "/rect/lo"),
                            complex(need(d, "hi", path + "/rect"), path + "/rect/hi"));
    }
    if (j.is_string() && j.get<std::string>() == "plane") return Region::full();
    throw at(path, "expected {disk: ...}, {rect: ...} or \"plane\"");
}

inline ConformalMap conformal_map(const json& j, const std::string& path) {
    std::string t = need(j, "type", path).get<std::string>();
    auto c = [&](const char* k) { return complex(need(j, k, path), path + "/" + k); };
    ConformalMap m;
    if (t == "identity")
        m = ConformalMap::identity();
    else if (t == "affine")
        m = ConformalMap::affine(c("a"), c("b"));
    else if (t == "mobius")
        m = ConformalMap::mobius(c("a"), c("b"), c("c"), c("d"));
    else if (t == "poly") {
        std::vector<cplx> k;
        const json& cs = need(j, "coeffs", path);
        for (size_t i = 0; i < cs.size(); ++i) k.push_back(complex(cs[i], path + "/coeffs/" + std::to_string(i)));
        m = ConformalMap::poly(k);
    } else if (t == "chain") {
        const json& ms = need(j, "maps", path);
        if (!ms.is_array() || ms.empty()) throw at(path + "/maps", "expected a non-empty list");
        m = conformal_map(ms[0], path + "/maps/0");
        for (size_t i = 1; i < ms.size(); ++i) m = compose_maps(m, conformal_map(ms[i], path + "/maps/" + std::to_string(i)));
    } else
        throw at(path + "/type", "unknown map type '" + t + "'");
    if (j.contains("domain")) m = m.with_domain(region(j["domain"], path + "/domain"));
    return m;
}

// string: prefix expression; object: {expr, cutoff: {center, plateau, support}, form}
inline Form field(const json& j, const std::string& path) {
    if (j.is_null()) return Form{};
    if (j.is_number() || j.is_array()) return Form::zero_form(Field(complex(j, path)));
    std::string expr;
    const json* cut = nullptr;
    std::string form = "1";
    if (j.is_string())
        expr = j.get<std::string>();
    else if (j.is_object()) {
        expr = need(j, "expr", path).get<std::string>();
        if (j.contains("cutoff")) cut = &j["cutoff"];
        if (j.contains("form")) form = j["form"].get<std::string>();
    } else
        throw at(path, "expected a field");
    Field f;
    try {
        f = parse_prefix(expr);
    } catch (const std::exception& e) {
        throw at(path + "/expr", e.what());
    }
    if (cut) {
        std::string p = path + "/cutoff";
        f = Field::bump(complex(need(*cut, "center", p), p + "/center"), number(need(*cut, "plateau", p), p + "/plateau"),
                        number(need(*cut, "support", p), p + "/support")) *
            f;
    }
    if (form == "1") return Form::zero_form(f);
    if (form == "dz") return Form::of(1, 0, f);
    if (form == "dzb") return Form::of(0, 1, f);
    if (form == "dzdzb") return Form::of(1, 1, f);
    throw at(path + "/form", "expected one of 1, dz, dzb, dzdzb");
}

inline Element element(const json& j, const GroupAction& G, const std::string& path) {
    int n = j.contains("size") ? j["size"].get<int>() : 1;
    Element e(n);
    const json& ts = need(j, "terms", path);
    for (size_t i = 0; i < ts.size(); ++i) {
        std::string p = path + "/terms/" + std::to_string(i);
        const json& t = ts[i];
        std::string lab = t.contains("label") ? t["label"].get<std::string>() : "e";
        int l;
        try {
            l = G.parse_label(lab);
        } catch (const std::exception& ex) {
            throw at(p + "/label", ex.what());
        }
        FMat m(n);
        if (t.contains("matrix")) {
            const json& M = t["matrix"];
            if (!M.is_array() || (int)M.size() != n) throw at(p + "/matrix", "expected " + std::to_string(n) + " rows");
            for (int r = 0; r < n; ++r) {
                if (!M[r].is_array() || (int)M[r].size() != n) throw at(p + "/matrix/" + std::to_string(r), "bad row length");
                for (int c = 0; c < n; ++c)
                    m(r, c) = field(M[r][c], p + "/matrix/" + std::to_string(r) + "/" + std::to_string(c));
            }
        } else {
            Form f = field(need(t, "field", p), p + "/field");
            for (int r = 0; r < n; ++r) m(r, r) = f;
        }
        e.add(Key{unit_word(), l}, m);
    }
    return e;
}

inline GroupAction group(const json& j, const std::string& path) {
    std::string kind = j.contains("kind") ? j["kind"].get<std::string>() : "trivial";
    if (kind == "trivial") return GroupAction::trivial();
    std::vector<std::string> names;
    std::vector<ConformalMap> maps;
    const json& gs = need(j, "generators", path);
    for (size_t i = 0; i < gs.size(); ++i) {
        std::string p = path + "/generators/" + std::to_string(i);
        names.push_back(need(gs[i], "name", p).get<std::string>());
        maps.push_back(conformal_map(need(gs[i], "map", p), p + "/map"));
        if (gs[i].contains("domain")) maps.back() = maps.back().with_domain(region(gs[i]["domain"], p + "/domain"));
    }
    try {
        if (kind == "mobius") return GroupAction::mobius(names, maps);
        if (kind == "free") return GroupAction::free(names, maps);
        if (kind == "cyclic") {
            if (names.size() != 1) throw usage_error("cyclic group takes one generator");
            return GroupAction::cyclic(need(j, "order", path).get<int>(), names[0], maps[0]);
        }
    } catch (const usage_error& e) {
        throw at(path, e.what());
    }
    throw at(path + "/kind", "unknown group kind '" + kind + "'");
}

inline std::string fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace config

inline Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("scenario: ") + e.what());
    }
    Scenario s;
    s.digest = config::fnv1a(text);
    if (j.contains("group")) s.act = config::group(j["group"], "/group");
    if (j.contains("quadrature")) {
        const json& q = j["quadrature"];
        if (q.contains("tol")) s.quad.tol = config::number(q["tol"], "/quadrature/tol");
        if (q.contains("max_depth")) s.quad.max_depth = q["max_depth"].get<int>();
        if (q.contains("threads")) s.quad.threads = q["threads"].get<int>();
    }
    if (j.contains("truncation")) s.truncation = j["truncation"].get<int>();
    if (j.contains("jet_order")) s.phi.order.jet_order = j["jet_order"].get<int>();
    if (j.contains("search_region")) s.phi.search = config::region(j["search_region"], "/search_region");
    if (j.contains("elements"))
        for (auto& [k, v] : j["elements"].items()) s.elements[k] = config::element(v, s.act, "/elements/" + k);
    auto named = [&](const json& v, const std::string& path) -> const Element& {
        std::string nm = v.get<std::string>();
        auto it = s.elements.find(nm);
        if (it == s.elements.end()) throw config::at(path, "unknown element '" + nm + "'");
        return it->second;
    };
    if (j.contains("ktheory"))
        for (auto& [k, v] : j["ktheory"].items()) {
            std::string p = "/ktheory/" + k;
            std::string t = config::need(v, "type", p).get<std::string>();
            if (t == "idempotent")
                s.idempotents[k] = named(config::need(v, "element", p), p + "/element");
            else if (t == "invertible") {
                const Element& a = named(config::need(v, "a", p), p + "/a");
                const Element& b = named(config::need(v, "b", p), p + "/b");
                if (a.n != b.n) throw config::at(p, "certificate size mismatch");
                s.invertibles[k] = {a, b};
            } else
                throw config::at(p + "/type", "expected idempotent or invertible");
        }
    if (j.contains("collapse") && j["collapse"].contains("group_cocycle")) {
        std::vector<cplx> v;
        const json& g = j["collapse"]["group_cocycle"];
        for (size_t i = 0; i < g.size(); ++i) v.push_back(config::complex(g[i], "/collapse/group_cocycle/" + std::to_string(i)));
        s.group_cocycle = v;
    }
    if (j.contains("todd"))
        for (size_t i = 0; i < j["todd"].size(); ++i) {
            std::string p = "/todd/" + std::to_string(i);
            const json& t = j["todd"][i];
            if (!t.is_array() || t.size() != 3) throw config::at(p, "expected three element names");
            std::array<std::string, 3> a;
            for (int k = 0; k < 3; ++k) {
                named(t[k], p + "/" + std::to_string(k));
                a[k] = t[k].get<std::string>();
            }
            s.todd.push_back(a);
        }
    if (j.contains("anomaly"))
        for (size_t i = 0; i < j["anomaly"].size(); ++i) {
            std::string p = "/anomaly/" + std::to_string(i);
            const json& a = j["anomaly"][i];
            AnomalySpec sp;
            sp.invertible = config::need(a, "invertible", p).get<std::string>();
            if (!s.invertibles.count(sp.invertible)) throw config::at(p + "/invertible", "unknown invertible");
            if (a.contains("gauge")) {
                named(a["gauge"], p + "/gauge");
                sp.gauge = a["gauge"].get<std::string>();
            }
            s.anomaly.push_back(sp);
        }
    if (j.contains("dist"))
        for (size_t i = 0; i < j["dist"].size(); ++i) {
            std::string p = "/dist/" + std::to_string(i);
            const json& d = j["dist"][i];
            DistSpec ds;
            ds.check = config::need(d, "check", p).get<std::string>();
            if (ds.check != "dolbeault" && ds.check != "covariance" && ds.check != "kernel")
                throw config::at(p + "/check", "expected dolbeault, covariance or kernel");
            if (d.contains("n")) ds.n = d["n"].get<int>();
            if (d.contains("z0")) ds.z0 = config::complex(d["z0"], p + "/z0");
            if (d.contains("shift")) ds.shift = config::complex(d["shift"], p + "/shift");
            if (d.contains("map")) ds.map = config::conformal_map(d["map"], p + "/map");
            if (ds.check == "covariance" && !ds.map) throw config::at(p, "covariance needs a map");
            ds.phi = config::field(config::need(d, "phi", p), p + "/phi").at(0, 0);
            s.dist.push_back(ds);
        }
    if (j.contains("expect")) {
        for (auto& [cmd, v] : j["expect"].items()) {
            if (cmd == "tolerance") {
                s.expect_tol = config::number(v, "/expect/tolerance");
                continue;
            }
            for (auto& [nm, x] : v.items()) s.expect[cmd][nm] = config::complex(x, "/expect/" + cmd + "/" + nm);
        }
    }
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open scenario file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str());
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

}  // namespace ncg
