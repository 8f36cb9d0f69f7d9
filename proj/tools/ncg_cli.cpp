#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "ncg/config.hpp"
#include "ncg/verify.hpp"

using namespace ncg;
using ojson = nlohmann::ordered_json;

namespace {

struct Flags {
    std::optional<double> tol;
    std::optional<int> depth, trunc, jet_order, threads;
    std::uint64_t seed = 7;
    double samples = 1.0;
    std::string out;
    bool no_timings = false;
};

ojson cj(cplx z) { return ojson{{"re", z.real()}, {"im", z.imag()}}; }

ojson word_json(const Word& w, const GroupAction& G) {
    ojson a = ojson::array();
    for (int l : w) a.push_back(l == UNIT_LETTER ? std::string("1~") : G.name(l));
    return a;
}

struct Report {
    ojson body;
    ojson checks = ojson::array();
    bool ok = true;
    void check(const std::string& name, bool pass, double value, double threshold, const std::string& detail = {}) {
        ojson c{{"name", name}, {"passed", pass}, {"value", value}, {"threshold", threshold}};
        if (!detail.empty()) c["detail"] = detail;
        checks.push_back(c);
        ok = ok && pass;
    }
    void expect(const Scenario& s, const std::string& cmd, const std::string& name, cplx v) {
        auto it = s.expect.find(cmd);
        if (it == s.expect.end()) return;
        auto jt = it->second.find(name);
        if (jt == it->second.end()) return;
        double d = std::abs(v - jt->second);
        check(cmd + ":" + name, d < s.expect_tol, d, s.expect_tol);
    }
};

std::set<int> labels_of(const Scenario& s) {
    std::set<int> r;
    for (auto& [n, e] : s.elements)
        for (auto& [k, m] : e.terms) r.insert(k.label);
    for (int i = 0; i < s.act.num_generators(); ++i) {
        r.insert(s.act.generator(i));
        r.insert(s.act.inv(s.act.generator(i)));
    }
    return r;
}

void cmd_automorphisms(const Scenario& s, Report& R) {
    AutomorphismSet S = enumerate_automorphisms(s.act, labels_of(s), s.phi.search, s.phi.order, s.phi.fixed);
    ojson fin = ojson::array(), inf = ojson::array();
    for (auto& a : S.finite) {
        ojson h = ojson::array();
        for (int i = 0; i < std::min<int>(4, (int)a.h_jet.c.size()); ++i) h.push_back(cj(a.h_jet[i]));
        fin.push_back({{"label", s.act.name(a.label)}, {"z0", cj(a.z0)}, {"order", a.order}, {"h_jet", h}});
    }
    for (int l : S.infinite) inf.push_back(s.act.name(l));
    R.body["isolated"] = fin;
    R.body["identity_germs"] = inf;
}

void cmd_trace(const Scenario& s, Report& R) {
    ojson out = ojson::object();
    for (auto& [name, e] : s.elements) {
        CocycleValue v = phi_value(e, s.act, s.phi);
        ojson br = ojson::array();
        for (auto& t : v.fixed_point_contributions)
            br.push_back({{"label", s.act.name(t.label)}, {"z0", cj(t.z0)}, {"order", t.order}, {"value", cj(t.value)}});
        out[name] = {{"value", cj(v.value)}, {"fixed_points", br}};
        R.expect(s, "trace", name, v.value);
    }
    R.body["trace"] = out;
}

void cmd_todd(const Scenario& s, Report& R) {
    CocycleContext C(s.act, s.quad);
    ojson out = ojson::array();
    for (auto& a : s.todd) {
        ToddValue t = todd(s.elements.at(a[0]), s.elements.at(a[1]), s.elements.at(a[2]), C, false);
        out.push_back({{"arguments", a},
                       {"fundamental", cj(t.fundamental.value)},
                       {"chern1", cj(t.chern.value)},
                       {"todd", cj(t.value.value)},
                       {"nabla_form", cj(t.nabla.value)},
                       {"defect", t.defect},
                       {"est_error", t.value.est_error + t.nabla.est_error}});
        R.check("todd_dual_path:" + a[0] + "," + a[1] + "," + a[2], t.defect < 2 * s.quad.tol, t.defect, 2 * s.quad.tol);
    }
    R.body["todd"] = out;
}

PairingOptions pairing_options(const Scenario& s) {
    PairingOptions po;
    po.truncation = s.truncation;
    po.phi = s.phi;
    po.quad = s.quad;
    return po;
}

void cmd_pair_even(const Scenario& s, Report& R) {
    ojson out = ojson::object();
    for (auto& [name, e] : s.idempotents) {
        PairingResult r = pair_even(e, s.act, pairing_options(s), CollapseFunctional{Tau0{}});
        ojson series = ojson::array();
        for (auto& [w, v] : r.series) series.push_back({{"word", word_json(w, s.act)}, {"value", cj(entry_sum(v))}});
        out[name] = {{"collapsed", cj(*r.collapsed)},     {"phi_part", cj(r.phi_part)},
                     {"integral_part", cj(r.integral_part)}, {"series", series},
                     {"dropped_words", r.dropped},          {"est_error", r.est_error}};
        R.expect(s, "pair-even", name, *r.collapsed);
    }
    R.body["pair_even"] = out;
}

void cmd_pair_odd(const Scenario& s, Report& R) {
    ojson out = ojson::object();
    for (auto& [name, u] : s.invertibles) {
        PairingResult r = pair_odd(u, s.act, pairing_options(s));
        ojson coeffs = ojson::array();
        std::set<int> ls{s.act.unit()};
        for (auto& [k, v] : r.one_form) {
            coeffs.push_back({{"word", word_json(k.first, s.act)}, {"label", s.act.name(k.second)}, {"value", cj(entry_sum(v))}});
            ls.insert(k.second);
        }
        ojson o{{"phi_part", cj(r.phi_part)}, {"integral_part", cj(r.integral_part)}, {"one_form", coeffs},
                {"est_error", r.est_error}};
        if (s.group_cocycle) {
            WordAlgebra W(s.act, s.truncation);
            cplx c = collapse(trace_of(r.one_form), GroupCocycle1::from_generators(s.act, *s.group_cocycle, ls), W);
            o["collapsed"] = cj(c);
            R.expect(s, "pair-odd", name, c);
        }
        out[name] = o;
    }
    R.body["pair_odd"] = out;
}

ojson natural_json(const OneFormCoeffs& v, const GroupAction& G) {
    ojson a = ojson::array();
    for (auto& [k, x] : v) a.push_back({{"word", word_json(k.first, G)}, {"label", G.name(k.second)}, {"value", cj(x)}});
    return a;
}

void cmd_anomaly(const Scenario& s, Report& R) {
    ojson out = ojson::array();
    WordAlgebra W(s.act, s.truncation);
    for (auto& sp : s.anomaly) {
        InvertibleLift L = lift_invertible(s.invertibles.at(sp.invertible), W);
        OneElement w = cp_mul(L.uinv, universal_d(L.u, W), W);
        Element A = sp.gauge.empty() ? cp_mul(L.uinv, diff(DiffOp::DelBar, L.u, s.act), W)
                                     : linear_lift(s.elements.at(sp.gauge));
        NaturalValues d0 = anomaly_delta0(w, W, s.phi), p0 = phi_natural(w, W, s.phi);
        bool same = true;
        for (auto& [k, v] : d0) same = same && p0.count(k) && p0.at(k) == v;
        same = same && d0.size() == p0.size();
        Delta1Result d1 = anomaly_delta1(A, w, W, s.quad, false);
        out.push_back({{"invertible", sp.invertible},
                       {"gauge", sp.gauge.empty() ? std::string("u^-1 dzb u") : sp.gauge},
                       {"delta0", natural_json(trace_of(d0), s.act)},
                       {"delta1_explicit", natural_json(d1.explicit_form, s.act)},
                       {"delta1_intrinsic", natural_json(d1.intrinsic_form, s.act)},
                       {"delta1_defect", d1.defect},
                       {"est_error", d1.est_error}});
        R.check("delta0_dual_path:" + sp.invertible, same, same ? 0.0 : 1.0, 0.5);
        R.check("delta1_dual_path:" + sp.invertible, d1.defect < 2 * s.quad.tol, d1.defect, 2 * s.quad.tol);
    }
    R.body["anomaly"] = out;
}

void cmd_dist(const Scenario& s, Report& R) {
    ojson out = ojson::array();
    int i = 0;
    for (auto& d : s.dist) {
        std::string tag = d.check + "#" + std::to_string(i++);
        if (d.check == "dolbeault") {
            DolbeaultCheck c = check_dolbeault(d.z0, d.phi, s.quad);
            out.push_back({{"check", d.check}, {"z0", cj(d.z0)}, {"lhs", cj(c.lhs)}, {"rhs", cj(c.rhs)}, {"defect", c.defect}});
            R.check(tag, c.defect < 1e-5, c.defect, 1e-5);
        } else if (d.check == "covariance") {
            CovarianceCheck c = check_covariance(d.n, *d.map, d.z0, d.phi, s.quad);
            double thr = d.n <= 2 ? 1e-5 : 1e-4;
            out.push_back({{"check", d.check}, {"n", d.n}, {"z0", cj(d.z0)}, {"lhs", cj(c.lhs)}, {"rhs", cj(c.rhs)},
                           {"defect", c.defect}});
            R.check(tag, c.defect < thr, c.defect, thr);
        } else {
            KernelResult base = pair_kernel({d.n, d.z0}, d.phi, s.quad);
            KernelResult k = pair_kernel({d.n, d.z0, d.shift}, d.phi, s.quad);
            double sd = std::abs(k.value - base.value - d.shift * eval(d.phi, d.z0));
            out.push_back({{"check", d.check}, {"n", d.n}, {"z0", cj(d.z0)}, {"value", cj(k.value)},
                           {"est_error", k.est_error}, {"shift_defect", sd}});
            R.check(tag, sd < 1e-8 && k.converged, sd, 1e-8);
        }
    }
    R.body["dist"] = out;
}

void cmd_verify(const Flags& f, Report& R, ojson& timings) {
    VerifyOptions o;
    o.seed = f.seed;
    o.samples = f.samples;
    if (f.tol) o.quad.tol = *f.tol;
    if (f.depth) o.quad.max_depth = *f.depth;
    if (f.threads) o.quad.threads = *f.threads;
    if (f.trunc) o.bott_truncation = *f.trunc;
    R.body["seed"] = f.seed;
    R.body["samples"] = f.samples;
    for (auto& c : run_all(o)) {
        R.check(c.name, c.pass, c.value, c.threshold, c.detail);
        timings[c.name] = c.seconds;
    }
}

void apply_flags(Scenario& s, const Flags& f) {
    if (f.tol) s.quad.tol = *f.tol;
    if (f.depth) s.quad.max_depth = *f.depth;
    if (f.threads) s.quad.threads = *f.threads;
    if (f.trunc) s.truncation = *f.trunc;
    if (f.jet_order) s.phi.order.jet_order = *f.jet_order;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crossed-product cocycle toolkit"};
    std::string command, scenario_path;
    Flags f;
    app.add_option("command", command, "automorphisms | trace | todd | pair-even | pair-odd | anomaly | dist-check | verify")
        ->required()
        ->check(CLI::IsMember({"automorphisms", "trace", "todd", "pair-even", "pair-odd", "anomaly", "dist-check", "verify"}));
    app.add_option("scenario", scenario_path, "scenario file (JSON)");
    app.add_option("--tol", f.tol, "quadrature tolerance");
    app.add_option("--depth", f.depth, "maximum quadrature refinement depth");
    app.add_option("--trunc", f.trunc, "truncation order of the word algebra");
    app.add_option("--jet-order", f.jet_order, "jet order used for fixed-point orders");
    app.add_option("--seed", f.seed, "seed for verify");
    app.add_option("--samples", f.samples, "sample-count multiplier for verify");
    app.add_option("--threads", f.threads, "quadrature worker cap");
    app.add_option("--out", f.out, "write the report here instead of stdout");
    app.add_flag("--no-timings", f.no_timings, "omit the timings field");
    CLI11_PARSE(app, argc, argv);

    auto t0 = std::chrono::steady_clock::now();
    Report R;
    ojson timings = ojson::object();
    ojson head{{"schema", 1}, {"command", command}};
    try {
        if (command == "verify") {
            head["inputs_digest"] = config::fnv1a("verify:" + std::to_string(f.seed) + ":" + std::to_string(f.samples));
            cmd_verify(f, R, timings);
        } else {
            if (scenario_path.empty()) throw usage_error("command '" + command + "' needs a scenario file");
            Scenario s = load_scenario(scenario_path);
            apply_flags(s, f);
            head["inputs_digest"] = s.digest;
            if (command == "automorphisms") cmd_automorphisms(s, R);
            if (command == "trace") cmd_trace(s, R);
            if (command == "todd") cmd_todd(s, R);
            if (command == "pair-even") cmd_pair_even(s, R);
            if (command == "pair-odd") cmd_pair_odd(s, R);
            if (command == "anomaly") cmd_anomaly(s, R);
            if (command == "dist-check") cmd_dist(s, R);
        }
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const usage_error& e) {
        std::cerr << command << ": usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 3;
    }
    ojson rep = head;
    for (auto& [k, v] : R.body.items()) rep[k] = v;
    rep["checks"] = R.checks;
    rep["passed"] = R.ok;
    timings["total_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!f.no_timings) rep["timings"] = timings;
    std::string text = rep.dump(2) + "\n";
    if (f.out.empty())
        std::cout << text;
    else {
        std::ofstream o(f.out);
        o << text;
    }
    return R.ok ? 0 : 1;
}
