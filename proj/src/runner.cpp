#include "weylab/cli/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "weylab/cli/sampling.hpp"
#include "weylab/errors.hpp"
#include "weylab/field/parser.hpp"
#include "weylab/ma/density.hpp"
#include "weylab/tractor/cotractor.hpp"

namespace weylab {

namespace {

struct CheckContext {
    const Scenario* sc;
    Geometry geo;
    double tols;
    int npts;
    unsigned seed;
};

ReportRecord residual_record(const CheckContext& c, const std::string& check,
                             int point_index, const std::vector<double>& point,
                             const std::string& quantity, double value, double tol) {
    ReportRecord r;
    r.scenario_id = c.sc->id;
    r.check = check;
    r.point_index = point_index;
    r.point = point;
    r.quantity = quantity;
    r.value = value;
    r.tol = tol;
    r.pass = std::abs(value) <= tol;
    return r;
}

ReportRecord info_record(const CheckContext& c, const std::string& check,
                         int point_index, const std::vector<double>& point,
                         const std::string& quantity, double value) {
    ReportRecord r;
    r.scenario_id = c.sc->id;
    r.check = check;
    r.point_index = point_index;
    r.point = point;
    r.quantity = quantity;
    r.value = value;
    r.tol = 0;  // informational: never counted as a failure
    r.pass = true;
    return r;
}

// The section the section-checks operate on: explicit expressions if given, a
// Lagrangian section from the potential otherwise (default potential |x|^2/2).
WeylSection scenario_section(const CheckContext& c) {
    const Connection& conn = c.geo.conn;
    const int n = conn.chart->dim();
    if (!c.sc->section.empty()) {
        TensorField psi(conn.chart, 0, 1);
        for (int i = 0; i < n; ++i) psi.at({i}) = parse_field(c.sc->section[i], n);
        return WeylSection::make(conn, psi);
    }
    ScalarField phi = c.sc->potential.empty()
                          ? [&] {
                                ScalarField f = ScalarField::constant(n, 0.0);
                                for (int a = 0; a < n; ++a) {
                                    ScalarField xa = ScalarField::coordinate(n, a);
                                    f = f + 0.5 * xa * xa;
                                }
                                return f;
                            }()
                          : parse_field(c.sc->potential, n);
    return WeylSection::make(conn, lagrangian_section(conn, phi));
}

DensityField scenario_density(const CheckContext& c) {
    const int n = c.geo.conn.chart->dim();
    if (!c.sc->density.empty())
        return DensityField::make(c.geo.conn.chart, Rational(1),
                                  parse_field(c.sc->density, n));
    if (c.sc->geometry.kind == "klein_ball") {
        ScalarField u2 = ScalarField::constant(n, 1.0);
        for (int a = 0; a < n; ++a) {
            ScalarField xa = ScalarField::coordinate(n, a);
            u2 = u2 - xa * xa;
        }
        return DensityField::make(c.geo.conn.chart, Rational(1), sqrt(u2));
    }
    return DensityField::make(c.geo.conn.chart, Rational(1),
                              ScalarField::constant(n, 1.0));
}

std::vector<ReportRecord> check_closedness(const CheckContext& c) {
    BundleSpace bs = BundleSpace::make(c.geo.conn);
    auto pts = sample_points(bs.total, c.npts, c.seed);
    TensorField dom = partial_derivative(bundle_two_form(bs));
    const int N = 2 * bs.n();
    std::vector<ReportRecord> out;
    for (size_t t = 0; t < pts.size(); ++t) {
        BatchEvaluator ev(pts[t]);
        double worst = 0;
        for (int a = 0; a < N; ++a)
            for (int b = a + 1; b < N; ++b)
                for (int e = b + 1; e < N; ++e) {
                    double v = ev.eval(dom.at({a, b, e})) - ev.eval(dom.at({b, a, e})) +
                               ev.eval(dom.at({e, a, b}));
                    worst = std::max(worst, std::abs(v));
                }
        out.push_back(residual_record(c, "closedness", int(t), pts[t], "d_omega",
                                      worst, 1e-9 * c.tols));
    }
    return out;
}

std::vector<ReportRecord> check_einstein(const CheckContext& c) {
    BundleSpace bs = BundleSpace::make(c.geo.conn);
    auto pts = sample_points(bs.total, c.npts, c.seed);
    const int N = 2 * bs.n();
    TensorField h = bundle_metric(bs);
    std::vector<ReportRecord> out;
    std::vector<double> lambdas;
    for (size_t t = 0; t < pts.size(); ++t) {
        BatchEvaluator ev(pts[t]);
        std::vector<std::vector<Jet>> jets(N, std::vector<Jet>(N));
        Eigen::MatrixXd H(N, N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                jets[a][b] = ev.eval_jet(h.at({a, b}), 2);
                H(a, b) = jets[a][b].value();
            }
        Eigen::MatrixXd ric = ricci_from_metric_jets(jets);
        double lambda = (H.inverse() * ric).trace() / N;
        lambdas.push_back(lambda);
        double res = (ric - lambda * H).cwiseAbs().maxCoeff() / H.cwiseAbs().maxCoeff();
        out.push_back(info_record(c, "einstein", int(t), pts[t], "lambda", lambda));
        out.push_back(residual_record(c, "einstein", int(t), pts[t],
                                      "einstein_residual", res, 1e-6 * c.tols));
        out.push_back(residual_record(c, "einstein", int(t), pts[t], "lambda_drift",
                                      lambda - lambdas[0], 1e-6 * c.tols));
    }
    return out;
}

std::vector<ReportRecord> check_curvature_dictionary(const CheckContext& c) {
    const Connection& conn = c.geo.conn;
    const int n = conn.chart->dim(), N = 2 * n;
    BundleSpace bs = BundleSpace::make(conn);
    auto pts = sample_points(bs.total, std::min(c.npts, 4), c.seed);
    TensorField W = weyl_curvature(conn);
    std::vector<ReportRecord> out;
    for (size_t t = 0; t < pts.size(); ++t) {
        const auto& p = pts[t];
        auto tc = torsion_curvature_D(bs, p);
        std::vector<double> x(p.begin(), p.begin() + n);
        // the Weyl representative determined by the fiber coordinate
        TensorField psi0(conn.chart, 0, 1);
        for (int j = 0; j < n; ++j)
            psi0.at({j}) = ScalarField::constant(n, p[n + j]);
        TensorField Y = cotton_york(projective_change(conn, psi0));
        BatchEvaluator evb(x);

        double vert = 0, tau_y = 0, rho_w = 0, rho_br = 0;
        for (int a = 0; a < N; ++a)
            for (int b = n; b < N; ++b)
                vert = std::max({vert, tc.tau[a][b].cwiseAbs().maxCoeff(),
                                 tc.tau[b][a].cwiseAbs().maxCoeff()});
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                for (int m = 0; m < n; ++m) {
                    tau_y = std::max(tau_y, std::abs(tc.tau[i][j][m]));
                    tau_y = std::max(tau_y, std::abs(tc.tau[i][j][n + m] -
                                                     evb.eval(Y.at({i, j, m}))));
                }
                for (int m = 0; m < n; ++m)
                    for (int e = 0; e < n; ++e) {
                        rho_w = std::max(rho_w,
                                         std::abs(tc.rho[i][j](m, e) -
                                                  evb.eval(W.at({m, i, j, e}))));
                        rho_w = std::max(rho_w,
                                         std::abs(tc.rho[i][j](n + m, n + e) +
                                                  evb.eval(W.at({e, i, j, m}))));
                    }
                Eigen::MatrixXd br = algebraic_bracket_g0(Eigen::VectorXd::Unit(n, i),
                                                          Eigen::VectorXd::Unit(n, j));
                rho_br = std::max(rho_br,
                                  (tc.rho[i][n + j] + br).cwiseAbs().maxCoeff());
            }
        out.push_back(residual_record(c, "curvature_dictionary", int(t), p,
                                      "torsion_vertical_arg", vert, 1e-10 * c.tols));
        out.push_back(residual_record(c, "curvature_dictionary", int(t), p,
                                      "tau_minus_y", tau_y, 1e-9 * c.tols));
        out.push_back(residual_record(c, "curvature_dictionary", int(t), p,
                                      "rho_minus_w", rho_w, 1e-8 * c.tols));
        out.push_back(residual_record(c, "curvature_dictionary", int(t), p,
                                      "rho_plus_bracket", rho_br, 1e-8 * c.tols));
    }
    return out;
}

std::vector<ReportRecord> check_universal_rho(const CheckContext& c) {
    const Connection& conn = c.geo.conn;
    const int n = conn.chart->dim();
    BundleSpace bs = BundleSpace::make(conn);
    auto pts = sample_points(conn.chart, std::min(c.npts, 10), c.seed);
    std::vector<ReportRecord> out;
    for (int k = 0; k < 25; ++k) {
        TensorField psi = random_poly_oneform(conn.chart, 2, c.seed + 1000 + k);
        TensorField dpsi = partial_derivative(psi);  // {i,j} = d_i psi_j
        TensorField ps = rho(projective_change(conn, psi));
        double worst = 0;
        for (const auto& x : pts) {
            std::vector<double> p(2 * n);
            for (int i = 0; i < n; ++i) p[i] = x[i];
            for (int j = 0; j < n; ++j) p[n + j] = psi.at({j}).eval(x);
            BatchEvaluator evt(p), evb(x);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double pullback =
                        evb.eval(dpsi.at({i, j})) + evt.eval(bs.A.at({i, j}));
                    worst = std::max(worst,
                                     std::abs(pullback - evb.eval(ps.at({i, j}))));
                }
        }
        out.push_back(residual_record(c, "universal_rho", k, {}, "pullback_gap",
                                      worst, 1e-9 * c.tols));
    }
    return out;
}

std::vector<ReportRecord> check_section_forms(const CheckContext& c) {
    WeylSection s = scenario_section(c);
    auto pts = sample_points(s.nabla0.chart, std::min(c.npts, 10), c.seed);
    std::vector<ReportRecord> out;
    auto cls = classify_section(s, pts);
    out.push_back(residual_record(c, "section_forms", -1, {}, "pullback_residual",
                                  cls.pullback_residual, 1e-9 * c.tols));
    out.push_back(residual_record(c, "section_forms", -1, {}, "skew_rho",
                                  cls.max_skew, 1e-8 * c.tols));
    out.push_back(info_record(c, "section_forms", -1, {}, "min_det_sym_rho",
                              cls.min_det_sym));
    auto ff = second_fundamental_forms(s, pts);
    auto ed = extrinsic_ii_oracle(s, AmbientConnection::CanonicalD, pts);
    auto eh = extrinsic_ii_oracle(s, AmbientConnection::LeviCivitaH, pts);
    const int n = s.n();
    for (size_t t = 0; t < pts.size(); ++t) {
        BatchEvaluator ev(pts[t]);
        double gd = 0, gh = 0;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    gd = std::max(gd, std::abs(ed[t][k](i, j) -
                                               ev.eval(ff.ii_d.at({k, i, j}))));
                    gh = std::max(gh, std::abs(eh[t][k](i, j) -
                                               ev.eval(ff.ii_h.at({k, i, j}))));
                }
        out.push_back(residual_record(c, "section_forms", int(t), pts[t], "ii_gap_d",
                                      gd, 1e-7 * c.tols));
        out.push_back(residual_record(c, "section_forms", int(t), pts[t], "ii_gap_h",
                                      gh, 1e-7 * c.tols));
    }
    return out;
}

std::vector<ReportRecord> check_section_residuals(const CheckContext& c) {
    WeylSection s = scenario_section(c);
    auto pts = sample_points(s.nabla0.chart, std::min(c.npts, 10), c.seed);
    auto r = section_residuals(s, pts);
    std::vector<ReportRecord> out;
    out.push_back(residual_record(c, "section_residuals", -1, {}, "minimal_residual",
                                  r.minimal_residual, 1e-9 * c.tols));
    out.push_back(residual_record(c, "section_residuals", -1, {},
                                  "totally_geodesic_residual",
                                  r.totally_geodesic_residual, 1e-9 * c.tols));
    for (size_t t = 0; t < pts.size(); ++t)
        out.push_back(residual_record(c, "section_residuals", int(t), pts[t],
                                      "mean_curvature",
                                      r.mean_curvature[t].cwiseAbs().maxCoeff(),
                                      1e-9 * c.tols));
    return out;
}

std::vector<ReportRecord> check_ma_residual(const CheckContext& c) {
    DensityField sigma = scenario_density(c);
    const int n = c.geo.conn.chart->dim();
    int sign = c.sc->ma_sign != 0 ? c.sc->ma_sign : (n % 2 == 0 ? 1 : -1);
    auto pts = sample_points(c.geo.conn.chart, c.npts, c.seed);
    auto rep = ma_residual(sigma, sign, c.geo.conn, pts);
    std::vector<ReportRecord> out;
    for (size_t t = 0; t < pts.size(); ++t)
        out.push_back(residual_record(c, "ma_residual", int(t), pts[t], "ma_residual",
                                      rep.residual[t], 1e-10 * c.tols));
    out.push_back(residual_record(c, "ma_residual", -1, {}, "det_identity",
                                  rep.det_identity_residual, 1e-9 * c.tols));
    out.push_back(residual_record(c, "ma_residual", -1, {}, "det_rho_parallel",
                                  rep.det_rho_parallel_residual, 1e-9 * c.tols));
    return out;
}

std::vector<ReportRecord> check_convexity(const CheckContext& c) {
    DensityField sigma = scenario_density(c);
    auto pts = sample_points(c.geo.conn.chart, c.npts, c.seed);
    auto cert = convexity_certificate(sigma, c.geo.conn, pts, 1e-8 * c.tols);
    std::vector<ReportRecord> out;
    ReportRecord a = info_record(c, "convexity_certificate", -1, {}, "is_ma_solution",
                                 cert.is_ma_solution ? 1.0 : 0.0);
    a.pass = cert.is_ma_solution;
    out.push_back(a);
    ReportRecord b = info_record(c, "convexity_certificate", -1, {},
                                 "rho_positive_definite",
                                 cert.rho_positive_definite ? 1.0 : 0.0);
    b.pass = cert.rho_positive_definite;
    out.push_back(b);
    out.push_back(residual_record(c, "convexity_certificate", -1, {},
                                  "minimal_lagrangian_residual",
                                  cert.minimal_lagrangian_residual, 1e-8 * c.tols));
    return out;
}

std::vector<ReportRecord> check_tractor_blocks(const CheckContext& c) {
    const Connection& conn = c.geo.conn;
    const int n = conn.chart->dim();
    auto pts = sample_points(conn.chart, std::min(c.npts, 8), c.seed);
    TensorField W = weyl_curvature(conn);
    TensorField Y = cotton_york(conn);
    auto k = tractor_curvature(conn, pts);
    std::vector<ReportRecord> out;
    for (size_t t = 0; t < pts.size(); ++t) {
        BatchEvaluator ev(pts[t]);
        double srow = 0, yb = 0, wb = 0;
        for (size_t pl = 0; pl < k.planes.size(); ++pl) {
            auto [i, j] = k.planes[pl];
            const Eigen::MatrixXd& m = k.kappa[t][pl];
            srow = std::max(srow, m.row(0).cwiseAbs().maxCoeff());
            for (int b = 0; b < n; ++b) {
                yb = std::max(yb, std::abs(m(1 + b, 0) + ev.eval(Y.at({i, j, b}))));
                for (int e = 0; e < n; ++e)
                    wb = std::max(wb, std::abs(m(1 + b, 1 + e) +
                                               ev.eval(W.at({e, i, j, b}))));
            }
        }
        out.push_back(residual_record(c, "tractor_blocks", int(t), pts[t],
                                      "sigma_row", srow, 1e-10 * c.tols));
        out.push_back(residual_record(c, "tractor_blocks", int(t), pts[t], "y_block",
                                      yb, 1e-9 * c.tols));
        out.push_back(residual_record(c, "tractor_blocks", int(t), pts[t], "w_block",
                                      wb, 1e-9 * c.tols));
    }
    return out;
}

std::vector<ReportRecord> check_engine(const CheckContext& c) {
    const int n = c.geo.conn.chart->dim();
    // a fixed rational-polynomial pair on the chart
    ScalarField f = ScalarField::constant(n, 1.0);
    ScalarField g = ScalarField::constant(n, 0.5);
    ScalarField den = ScalarField::constant(n, 1.0);
    for (int a = 0; a < n; ++a) {
        ScalarField xa = ScalarField::coordinate(n, a);
        f = f + (0.3 + 0.1 * a) * xa + 0.2 * xa * ScalarField::coordinate(n, (a + 1) % n);
        g = g + 0.25 * xa * xa;
        den = den + 0.25 * xa * xa;
    }
    f = f / den;
    auto pts = sample_points(c.geo.conn.chart, std::min(c.npts, 10), c.seed);
    std::vector<ReportRecord> out;
    const double hstep = 1e-5;
    for (size_t t = 0; t < pts.size(); ++t) {
        const auto& x = pts[t];
        BatchEvaluator ev(x);
        Jet jf = ev.eval_jet(f, 2), jg = ev.eval_jet(g, 2), jfg = ev.eval_jet(f * g, 2);
        double fd_gap = 0, leibniz = 0;
        for (int a = 0; a < n; ++a) {
            std::vector<double> xp = x, xm = x;
            xp[a] += hstep;
            xm[a] -= hstep;
            double fd = (f.eval(xp) - f.eval(xm)) / (2 * hstep);
            double an = jf.derivative(a).value();
            fd_gap = std::max(fd_gap, std::abs(fd - an) / std::max(1.0, std::abs(an)));
            leibniz = std::max(leibniz,
                               std::abs(jfg.derivative(a).value() -
                                        (jf.derivative(a).value() * jg.value() +
                                         jf.value() * jg.derivative(a).value())));
        }
        out.push_back(residual_record(c, "engine_soundness", int(t), x, "fd_gap",
                                      fd_gap, 1e-5 * c.tols));
        out.push_back(residual_record(c, "engine_soundness", int(t), x, "leibniz",
                                      leibniz, 1e-10 * c.tols));
    }
    if (c.geo.metric) {
        TensorField nabla_g = covariant_derivative(*c.geo.metric, c.geo.conn.gamma);
        double worst = 0;
        for (const auto& x : pts) worst = std::max(worst, max_abs(nabla_g, x));
        out.push_back(residual_record(c, "engine_soundness", -1, {}, "metricity",
                                      worst, 1e-10 * c.tols));
    }
    return out;
}

std::vector<ReportRecord> run_check(const CheckContext& c, const std::string& name) {
    if (name == "closedness") return check_closedness(c);
    if (name == "einstein") return check_einstein(c);
    if (name == "curvature_dictionary") return check_curvature_dictionary(c);
    if (name == "universal_rho") return check_universal_rho(c);
    if (name == "section_forms") return check_section_forms(c);
    if (name == "section_residuals") return check_section_residuals(c);
    if (name == "ma_residual") return check_ma_residual(c);
    if (name == "convexity_certificate") return check_convexity(c);
    if (name == "tractor_blocks") return check_tractor_blocks(c);
    if (name == "engine_soundness") return check_engine(c);
    throw ParseError("runner: unknown check '" + name + "'");
}

int thread_budget() {
    const char* env = std::getenv("WEYLAB_THREADS");
    if (!env) return 1;
    int v = std::atoi(env);
    return v < 1 ? 1 : v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const RunOptions& opt) {
    CheckContext ctx;
    ctx.sc = &sc;
    ctx.geo = catalog_geometry(sc.geometry);
    ctx.tols = sc.tol_scale * opt.tol_scale;
    ctx.npts = opt.points.value_or(sc.points);
    ctx.seed = opt.seed.value_or(sc.seed);

    const int nchecks = static_cast<int>(sc.checks.size());
    std::vector<std::vector<ReportRecord>> slots(nchecks);
    std::vector<std::exception_ptr> errors(nchecks);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < nchecks; i = next.fetch_add(1)) {
            try {
                slots[i] = run_check(ctx, sc.checks[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    int nthreads = std::min(thread_budget(), nchecks);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    RunResult out;
    for (auto& s : slots)
        for (auto& r : s) {
            out.all_pass = out.all_pass && r.pass;
            out.records.push_back(std::move(r));
        }
    return out;
}

std::string to_csv(const std::vector<ReportRecord>& records) {
    std::ostringstream os;
    os << "scenario_id,check,point_index,point_coords,quantity,value,tol,pass\n";
    for (const auto& r : records) {
        os << r.scenario_id << ',' << r.check << ',' << r.point_index << ',';
        for (size_t i = 0; i < r.point.size(); ++i) {
            if (i) os << ' ';
            os << format_double(r.point[i]);
        }
        os << ',' << r.quantity << ',' << format_double(r.value) << ','
           << format_double(r.tol) << ',' << (r.pass ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string to_json(const std::vector<ReportRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        arr.push_back({{"scenario_id", r.scenario_id},
                       {"check", r.check},
                       {"point_index", r.point_index},
                       {"point_coords", r.point},
                       {"quantity", r.quantity},
                       {"value", r.value},
                       {"tol", r.tol},
                       {"pass", r.pass}});
    }
    return arr.dump(2) + "\n";
}

std::vector<Scenario> builtin_verification_scenarios() {
    auto make = [](const char* id, const char* kind, int dim,
                   std::vector<std::string> checks, unsigned gseed = 0) {
        Scenario s;
        s.id = id;
        s.geometry.kind = kind;
        s.geometry.dim = dim;
        s.geometry.seed = gseed;
        s.checks = std::move(checks);
        s.points = 8;
        s.seed = 1;
        return s;
    };
    std::vector<Scenario> out;
    out.push_back(make("flat2", "flat", 2,
                       {"closedness", "einstein", "curvature_dictionary",
                        "universal_rho", "tractor_blocks", "engine_soundness"}));
    out.push_back(make("flat3", "flat", 3, {"closedness", "einstein"}));
    {
        Scenario s = make("klein2", "klein_ball", 2,
                          {"closedness", "einstein", "ma_residual",
                           "convexity_certificate", "section_residuals",
                           "section_forms", "engine_soundness"});
        s.section = {"0", "0"};
        out.push_back(s);
    }
    {
        Scenario s = make("klein3", "klein_ball", 3, {"ma_residual"});
        out.push_back(s);
    }
    out.push_back(make("randpoly2", "random_poly", 2,
                       {"closedness", "einstein", "curvature_dictionary",
                        "universal_rho", "section_forms", "tractor_blocks"},
                       42));
    out.push_back(make("randpoly3", "random_poly", 3,
                       {"closedness", "einstein", "tractor_blocks"}, 7));
    return out;
}

}  // namespace weylab
