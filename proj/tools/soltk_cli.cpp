// Batch front end: named experiments from JSON configs to CSV/JSON artifacts
// and a machine-readable report. Exit codes: 0 pass, 2 residual failure,
// 1 usage/config error.

#include "soltk/birkhoff.hpp"
#include "soltk/dressing.hpp"
#include "soltk/elliptic.hpp"
#include "soltk/geometry.hpp"
#include "soltk/io.hpp"
#include "soltk/jet.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <set>

using njson = nlohmann::ordered_json;
using namespace soltk;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Run {
  std::filesystem::path out;
  double tol_scale = 1.0;
  njson residuals = njson::object();
  njson pass = njson::object();

  void residual(const std::string& name, double value, double bar) {
    residuals[name] = fmt17(value);
    pass[name] = value <= bar * tol_scale;
  }
  bool all_pass() const {
    for (const auto& [k, v] : pass.items())
      if (!v.get<bool>()) return false;
    return true;
  }
  void write(const std::string& name, const std::string& body) const {
    write_text((out / name).string(), body);
  }
};

void check_keys(const njson& obj, const std::set<std::string>& required,
                const std::set<std::string>& optional,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : obj.items())
    if (!required.count(k) && !optional.count(k))
      throw ConfigError(where + ": unknown key '" + k + "'");
  for (const auto& k : required)
    if (!obj.contains(k)) throw ConfigError(where + ": missing key '" + k + "'");
}

GridDomain parse_grid(const njson& g) {
  check_keys(g, {"nx", "nt", "x0", "x1", "t0", "t1"}, {}, "grid");
  return GridDomain{g["nx"].get<int>(), g["nt"].get<int>(),
                    g["x0"].get<double>(), g["x1"].get<double>(),
                    g["t0"].get<double>(), g["t1"].get<double>()};
}

Cplx parse_cplx(const njson& v) {
  if (!v.is_array() || v.size() != 2)
    throw ConfigError("complex values are [re, im] pairs");
  return {v[0].get<double>(), v[1].get<double>()};
}

Mat parse_mat(const njson& rows) {
  const int n = static_cast<int>(rows.size());
  Mat m(n, static_cast<int>(rows[0].size()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < static_cast<int>(rows[i].size()); ++j)
      m(i, j) = parse_cplx(rows[i][j]);
  return m;
}

Vec parse_vec(const njson& v) {
  Vec out(static_cast<int>(v.size()));
  for (int i = 0; i < out.size(); ++i) out(i) = parse_cplx(v[i]);
  return out;
}

Mat pick_b(const AlgebraContext& ctx, const njson& cfg) {
  const std::string b = cfg.value("b", "a");
  if (b == "a") return ctx.a;
  if (b == "a2") return ctx.a * ctx.a;
  throw ConfigError("b must be 'a' or 'a2'");
}

double frame_reality_defect(const FrameFn& E, RealityCondition rc) {
  double defect = 0.0;
  for (double x : {-0.2, 0.15})
    for (double t : {-0.1, 0.2})
      for (Cplx l : {Cplx(0.8, 0.3), Cplx(-0.6, 0.5)}) {
        const Mat Er = E(x, t, l);
        Mat paired;
        switch (rc) {
          case RealityCondition::U:
            paired = E(x, t, std::conj(l)).adjoint();
            break;
          default:
            paired = E(x, t, 1.0 / std::conj(l)).adjoint();
            break;
        }
        const int n = static_cast<int>(Er.rows());
        defect = std::max(
            defect, fnorm(Mat(paired * Er) - Mat::Identity(n, n)) /
                        std::max(1.0, fnorm(Er)));
      }
  return defect;
}

int run_compute_q(const njson& cfg, Run& run) {
  check_keys(cfg, {"command", "context", "j"}, {"b"}, "config");
  auto ctx = make_context(cfg["context"].get<std::string>());
  const auto Q = compute_Q(ctx, pick_b(ctx, cfg), cfg["j"].get<int>());
  run.write("q.json", to_json(Q).dump(2) + "\n");
  run.pass["computed"] = true;
  return 0;
}

int run_flow_rhs(const njson& cfg, Run& run) {
  check_keys(cfg, {"command", "context", "j"}, {"b"}, "config");
  auto ctx = make_context(cfg["context"].get<std::string>());
  const auto F = flow_rhs(ctx, pick_b(ctx, cfg), cfg["j"].get<int>());
  run.write("flow.json", to_json(F).dump(2) + "\n");
  run.pass["computed"] = true;
  return 0;
}

int run_verify(const njson& cfg, Run& run) {
  check_keys(cfg, {"command", "solution", "grid"},
             {"amplitude", "wavenumber", "lambda", "j"}, "config");
  const std::string sol = cfg["solution"].get<std::string>();
  const GridDomain dom = parse_grid(cfg["grid"]);
  const double A = cfg.value("amplitude", 0.8);
  const double k = cfg.value("wavenumber", 1.3);
  auto ctx = make_context("sl2-su2");
  const Cplx I(0, 1);

  SolutionGrid g;
  std::string tag;
  int j = cfg.value("j", 2);
  if (sol == "nls-plane-wave") {
    const double w = A * A - 0.5 * k * k;
    g = SolutionGrid::sample(dom, {"q", "r"}, [&](int c, double x, double t) {
      const Cplx q = A * std::exp(I * (k * x + w * t));
      return c == 0 ? q : -std::conj(q);
    });
    tag = "nls-qr";
    j = 2;
  } else if (sol == "mkdv-soliton") {
    g = SolutionGrid::sample(dom, {"q", "r"}, [&](int c, double x, double t) {
      const double u = k / std::cosh(k * (x - 0.25 * k * k * t));
      return Cplx(c == 0 ? u : -u, 0.0);
    });
    tag = "mkdv-su2";
    j = 3;
  } else if (sol == "sge-kink") {
    g = SolutionGrid::sample(dom, {"q"}, [&](int, double x, double t) {
      return Cplx(4.0 * std::atan(std::exp(x + t)), 0.0);
    });
    tag = "sge";
  } else {
    throw ConfigError("unknown solution '" + sol + "'");
  }

  if (tag == "mkdv-su2" || tag == "sge") {
    SolutionGrid gq;
    gq.dom = dom;
    gq.names = {"q"};
    gq.comp = {g.comp[0]};
    run.residual("pde", pde_residual(tag, gq), 1e-5);
  } else {
    run.residual("pde", pde_residual(tag, g), 1e-5);
  }
  if (sol != "sge-kink") {
    const Cplx lambda =
        cfg.contains("lambda") ? parse_cplx(cfg["lambda"]) : Cplx(1, 0);
    const auto f = assemble_lax(ctx, g, ctx.a, j, lambda);
    run.residual("flatness", flatness_residual(f), 1e-4);
  }
  run.write("fields.csv", to_csv(g));
  return 0;
}

int run_dress(const njson& cfg, Run& run) {
  check_keys(cfg, {"command", "context", "family", "grid"},
             {"s", "V", "W", "Z", "flow_j", "minus1", "poles"}, "config");
  const std::string family = cfg["family"].get<std::string>();
  const GridDomain dom = parse_grid(cfg["grid"]);
  auto ctx = make_context(cfg["context"].get<std::string>());

  if (family == "g") {
    std::vector<std::pair<double, Mat>> poles;
    if (cfg.contains("poles")) {
      for (const auto& p : cfg["poles"]) {
        check_keys(p, {"s", "V"}, {}, "poles[]");
        poles.emplace_back(p["s"].get<double>(), parse_vec(p["V"]));
      }
    } else {
      if (!cfg.contains("s") || !cfg.contains("V"))
        throw ConfigError("g-family dressing needs s and V (or poles)");
      poles.emplace_back(cfg["s"].get<double>(), parse_vec(cfg["V"]));
    }
    const bool minus1 = cfg.value("minus1", false);
    const int j = cfg.value("flow_j", 2);
    const Mat a = ctx.a;
    const FrameFn E0 = minus1 ? vacuum_frame_minus1(a, -0.25 * a)
                              : vacuum_frame(a, a, j);
    const auto d = multi_dress_g(a, E0, poles);

    double proj_defect = 0.0;
    for (double x : {-0.2, 0.1})
      for (double t : {-0.1, 0.2}) {
        const Mat p = d.proj(x, t);
        proj_defect = std::max({proj_defect, fnorm(p * p - p),
                                fnorm(p - p.adjoint())});
      }
    run.residual("projection", proj_defect, 1e-10);
    run.residual("reality", frame_reality_defect(d.frame, RealityCondition::U),
                 1e-8);

    if (minus1) {
      MatGrid u = MatGrid::zero(dom, 2), v = MatGrid::zero(dom, 2);
      const Mat b = -0.25 * a;
      for (int it = 0; it < dom.nt; ++it)
        for (int ix = 0; ix < dom.nx; ++ix) {
          u.at(ix, it) = d.u_delta(dom.x(ix), dom.t(it));
          v.at(ix, it) = d.v_conj(b, dom.x(ix), dom.t(it));
        }
      run.residual("minus1", minus1_residual(a, u, v), 1e-4);
      run.write("u.csv", to_csv(u));
      run.write("v.csv", to_csv(v));
    } else {
      SolutionGrid g;
      g.dom = dom;
      g.names = {"q", "r"};
      g.comp = {ScalarGrid(dom.nx, dom.nt), ScalarGrid(dom.nx, dom.nt)};
      for (int it = 0; it < dom.nt; ++it)
        for (int ix = 0; ix < dom.nx; ++ix) {
          const Mat u = d.u_delta(dom.x(ix), dom.t(it));
          g.comp[0](ix, it) = u(0, 1);
          g.comp[1](ix, it) = u(1, 0);
        }
      if (j == 2) run.residual("pde", pde_residual("nls-qr", g), 1e-5);
      run.write("fields.csv", to_csv(g));
    }
    return 0;
  }

  if (family == "h") {
    check_keys(cfg, {"command", "context", "family", "grid", "s", "W", "Z"},
               {}, "config");
    const Mat a1 = ctx.basis_A.at(0), a2 = ctx.basis_A.at(1);
    const FrameFn E0 = [a1, a2](double x1, double x2, Cplx l) -> Mat {
      return expm((a1 * x1 + a2 * x2) * l);
    };
    const auto d = dress_h(E0, cfg["s"].get<double>(), parse_vec(cfg["W"]),
                           parse_vec(cfg["Z"]));
    SolutionGrid g;
    g.dom = dom;
    g.names = {"f12", "f21"};
    g.comp = {ScalarGrid(dom.nx, dom.nt), ScalarGrid(dom.nx, dom.nt)};
    for (int it = 0; it < dom.nt; ++it)
      for (int ix = 0; ix < dom.nx; ++ix) {
        const Mat F = d.F_delta(dom.x(ix), dom.t(it));
        g.comp[0](ix, it) = F(0, 1);
        g.comp[1](ix, it) = F(1, 0);
      }
    run.residual("system", grassmann_residual(g), 1e-5);
    double tau_defect = 0.0;
    for (Cplx l : {Cplx(0.8, 0.1), Cplx(-0.5, 1.2)}) {
      const Mat h = d.frame(0.1, -0.15, l);
      const Mat hc = d.frame(0.1, -0.15, std::conj(l));
      tau_defect = std::max(tau_defect, fnorm(hc.conjugate() - h));
    }
    run.residual("reality", tau_defect, 1e-8);
    run.write("fields.csv", to_csv(g));
    return 0;
  }

  throw ConfigError("family must be 'g' or 'h'");
}

int run_goursat(const njson& cfg, Run& run) {
  check_keys(cfg, {"command", "preset", "grid"}, {"N", "K"}, "config");
  const std::string preset = cfg["preset"].get<std::string>();
  const GridDomain dom = parse_grid(cfg["grid"]);
  const int N = cfg.value("N", 32), K = cfg.value("K", 8);
  const Cplx I(0, 1);
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = I;
  a(1, 1) = -I;
  const Mat b = -0.25 * a;

  std::function<Mat(double)> xi, eta;
  if (preset == "vacuum") {
    xi = [](double) { return Mat(Mat::Zero(2, 2)); };
    eta = [b](double) { return b; };
  } else if (preset == "sge-kink") {
    xi = [](double x) {
      Mat m = Mat::Zero(2, 2);
      m(0, 1) = 1.0 / std::cosh(x);
      m(1, 0) = -m(0, 1);
      return m;
    };
    eta = [I](double t) {
      const double q = 4.0 * std::atan(std::exp(t));
      Mat m(2, 2);
      m(0, 0) = -0.25 * I * std::cos(q);
      m(0, 1) = -0.25 * I * std::sin(q);
      m(1, 0) = m(0, 1);
      m(1, 1) = -m(0, 0);
      return m;
    };
  } else {
    throw ConfigError("unknown preset '" + preset + "'");
  }

  const auto r = goursat_solve(a, xi, eta, dom, N, K);
  run.residual("minus1", minus1_residual(a, r.u, r.v), 1e-4);
  double axis = 0.0;
  for (int ix = 0; ix < dom.nx; ++ix)
    axis = std::max(axis, fnorm(r.u.at(ix, 0) - xi(dom.x(ix))));
  for (int it = 0; it < dom.nt; ++it)
    axis = std::max(axis, fnorm(r.v.at(0, it) - eta(dom.t(it))));
  run.residual("axis", axis, 1e-6);
  run.residuals["max_condition"] = fmt17(r.max_condition);
  run.write("u.csv", to_csv(r.u));
  run.write("v.csv", to_csv(r.v));
  return 0;
}

int run_finite_type(const njson& cfg, Run& run) {
  check_keys(cfg, {"command", "context", "m", "d", "V", "grid"}, {"lambda0"},
             "config");
  auto ctx = make_context(cfg["context"].get<std::string>());
  EllipticContext ec{ctx, cfg["m"].get<int>(), cfg["d"].get<int>()};
  LaurentLoop V;
  V.lo = -ec.d;
  V.c.assign(2 * ec.d + 1, Mat::Zero(ctx.dim, ctx.dim));
  for (const auto& term : cfg["V"]) {
    check_keys(term, {"power", "matrix"}, {}, "V[]");
    const int p = term["power"].get<int>();
    if (p < -ec.d || p > ec.d) throw ConfigError("V power outside [-d, d]");
    V.c[p + ec.d] = parse_mat(term["matrix"]);
  }
  const GridDomain dom = parse_grid(cfg["grid"]);
  const auto f = finite_type_integrate(ec, V, dom);

  const Cplx l0 = cfg.contains("lambda0") ? parse_cplx(cfg["lambda0"])
                                          : std::polar(1.0, 0.7);
  Eigen::ComplexEigenSolver<Mat> es(V.eval(l0));
  double spec = 0.0, real_defect = 0.0;
  for (int iy = 0; iy < dom.nt; ++iy)
    for (int ix = 0; ix < dom.nx; ++ix) {
      Eigen::ComplexEigenSolver<Mat> eh(f.at(ix, iy).eval(l0));
      for (int i = 0; i < ctx.dim; ++i) {
        double best = 1e18;
        for (int j = 0; j < ctx.dim; ++j)
          best = std::min(best,
                          std::abs(eh.eigenvalues()(i) - es.eigenvalues()(j)));
        spec = std::max(spec, best);
      }
      real_defect =
          std::max(real_defect, loop_reality_defect(ctx.tau, f.at(ix, iy)));
    }
  run.residual("isospectrality", spec, 1e-6);
  run.residual("reality", real_defect, 1e-8);

  const auto slots = extract_slots(f);
  run.residual("normalized_system", gtau_residual(ec, slots, true).residual,
               1e-5);
  const auto Fm1 = recover_frame(ec, f, Cplx(-1, 0));
  MatGrid s = MatGrid::zero(dom, ctx.dim);
  for (int iy = 0; iy < dom.nt; ++iy)
    for (int ix = 0; ix < dom.nx; ++ix) s.at(ix, iy) = Fm1.at(ix, iy);
  run.residual("harmonic", harmonic_residual(ctx.tau, s), 1e-5);
  for (size_t j = 0; j < slots.size(); ++j)
    run.write("slot" + std::to_string(j + 1) + ".csv", to_csv(slots[j]));
  return 0;
}

int run_extract(const njson& cfg, Run& run) {
  check_keys(cfg, {"command", "what", "frame", "grid"}, {"s", "W", "Z", "V"},
             "config");
  const std::string what = cfg["what"].get<std::string>();
  const std::string frame = cfg["frame"].get<std::string>();
  const GridDomain dom = parse_grid(cfg["grid"]);
  const Cplx I(0, 1);

  FrameFn E;
  std::vector<Mat> basis_A;
  std::optional<InvolutionSpec> sigma;
  Mat a_minus1;
  if (frame == "vacuum-o4" || frame == "dressed-h") {
    auto ctx = make_context("o4-grassmann");
    basis_A = ctx.basis_A;
    sigma = ctx.sigma;
    const Mat a1 = basis_A[0], a2 = basis_A[1];
    E = [a1, a2](double x1, double x2, Cplx l) -> Mat {
      return expm((a1 * x1 + a2 * x2) * l);
    };
    if (frame == "dressed-h") {
      const double s = cfg.value("s", 0.6);
      Vec W(2), Z(2);
      W << 1.0, 0.0;
      Z << 0.0, 1.0;
      if (cfg.contains("W")) W = parse_vec(cfg["W"]);
      if (cfg.contains("Z")) Z = parse_vec(cfg["Z"]);
      E = dress_h(E, s, W, Z).frame;
    }
  } else if (frame == "vacuum-minus1" || frame == "dressed-g-minus1") {
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = I;
    a(1, 1) = -I;
    a_minus1 = a;
    E = vacuum_frame_minus1(a, -0.25 * a);
    if (frame == "dressed-g-minus1") {
      Mat V(2, 1);
      V << 1.0, 1.0;
      if (cfg.contains("V")) V = parse_vec(cfg["V"]);
      E = dress_g(a, E, cfg.value("s", 0.5), V).frame;
    }
  } else {
    throw ConfigError("unknown frame '" + frame + "'");
  }

  if (what == "curved-flat") {
    if (basis_A.empty()) throw ConfigError("curved-flat needs an o4 frame");
    const MatGrid Y = curved_flat_tangent(E, dom);
    run.residual("gram_drift", gram_drift(basis_A, Y), 1e-6);
    run.write("immersion.csv", to_csv(Y));
    return 0;
  }
  if (what == "cartan") {
    if (!sigma) throw ConfigError("cartan needs an o4 frame");
    const auto cm = cartan_map(E, *sigma, dom);
    run.residual("sigma_defect", cm.sigma_defect, 1e-8);
    run.residual("log_derivative",
                 cartan_log_derivative_defect(E, basis_A, cm.psi), 1e-4);
    run.write("immersion.csv", to_csv(cm.psi));
    return 0;
  }
  if (what == "harmonic") {
    if (a_minus1.size() == 0) throw ConfigError("harmonic needs a -1-flow frame");
    const auto h = harmonic_from_minus1(E, dom);
    run.residual("harmonic", h.residual, 1e-5);
    const MatGrid sx = d_x(h.s, dom.dx());
    Eigen::ComplexEigenSolver<Mat> ea(2.0 * a_minus1);
    double spec = 0.0;
    for (int it = 3; it < dom.nt - 3; ++it)
      for (int ix = 3; ix < dom.nx - 3; ++ix) {
        Eigen::ComplexEigenSolver<Mat> eh(
            Mat(h.s.at(ix, it).partialPivLu().solve(sx.at(ix, it))));
        for (int i = 0; i < 2; ++i) {
          double best = 1e18;
          for (int j = 0; j < 2; ++j)
            best = std::min(
                best, std::abs(eh.eigenvalues()(i) - ea.eigenvalues()(j)));
          spec = std::max(spec, best);
        }
      }
    run.residual("spectrum", spec, 1e-5);
    run.write("immersion.csv", to_csv(h.s));
    return 0;
  }
  throw ConfigError("what must be curved-flat, cartan, or harmonic");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soltk batch runner"};
  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  double tol_scale = 1.0;
  app.add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized suites");
  app.add_option("--tolerance-scale", tol_scale, "scale all pass thresholds");
  CLI11_PARSE(app, argc, argv);

  const auto t0 = std::chrono::steady_clock::now();
  njson cfg;
  Run run;
  run.tol_scale = tol_scale;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config " + config_path);
    cfg = njson::parse(in);
    if (!cfg.contains("command")) throw ConfigError("config: missing command");
    run.out = out_dir;
    std::filesystem::create_directories(run.out);

    const std::string cmd = cfg["command"].get<std::string>();
    if (cmd == "compute-q") run_compute_q(cfg, run);
    else if (cmd == "flow-rhs") run_flow_rhs(cfg, run);
    else if (cmd == "verify") run_verify(cfg, run);
    else if (cmd == "dress") run_dress(cfg, run);
    else if (cmd == "goursat") run_goursat(cfg, run);
    else if (cmd == "finite-type") run_finite_type(cfg, run);
    else if (cmd == "extract") run_extract(cfg, run);
    else throw ConfigError("unknown command '" + cmd + "'");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const njson::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  njson report;
  report["command"] = cfg["command"];
  report["inputs_digest"] = fnv1a_hex(cfg.dump());
  report["residuals"] = run.residuals;
  report["pass"] = run.pass;
  report["wall_time_ms"] = ms;
  try {
    write_text((run.out / "report.json").string(), report.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return run.all_pass() ? 0 : 2;
}
