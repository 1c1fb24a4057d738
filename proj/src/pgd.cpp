#include "latinpgd/pgd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>
#include <string>

namespace latinpgd {

GlobalContext::GlobalContext(const SpatialSystem& sys, const TimeGrid& g, TdgScheme s)
    : system(&sys), grid(g), scheme(s) {
  quad.space = sys.weights();
  quad.time = g.gauss_weights();
}

void PgdSolution::add_mode(const PgdMode& mode) {
  auto append = [](Eigen::MatrixXd& m, const Eigen::VectorXd& v) {
    if (m.cols() == 0) m.resize(v.size(), 0);
    m.conservativeResize(Eigen::NoChange, m.cols() + 1);
    m.col(m.cols() - 1) = v;
  };
  append(u_modes, mode.u);
  append(eps_modes, mode.eps);
  append(lambda, mode.lambda.coefficients());
  append(sigma_modes, mode.sigma);
  append(mu, mode.mu.coefficients());
}

Reconstruction reconstruct(const PgdSolution& sol, const TimeGrid& grid) {
  Reconstruction r{sol.u_el, sol.eps_el, sol.sigma_el};
  if (sol.num_modes() > 0) {
    const Eigen::MatrixXd lg = gauss_values(grid, sol.lambda);
    r.u.noalias() += sol.u_modes * lg.transpose();
    r.eps.noalias() += sol.eps_modes * lg.transpose();
  }
  if (sol.num_stress_modes() > 0) r.sigma.noalias() += sol.sigma_modes * gauss_values(grid, sol.mu).transpose();
  return r;
}

FieldST compute_delta(const FieldST& sigma, const FieldST& sigma_hat) {
  if (sigma.rows() != sigma_hat.rows() || sigma.cols() != sigma_hat.cols())
    throw std::invalid_argument("compute_delta: grid mismatch");
  return sigma - sigma_hat;
}

SpaceSolver::SpaceSolver(const SpatialSystem& system) : system_(system) {}

Eigen::VectorXd SpaceSolver::solve(double s_dd, double s_d, double s_0, const Eigen::VectorXd& rhs_free) {
  if (rhs_free.size() != system_.num_free()) throw std::invalid_argument("SpaceSolver: rhs size mismatch");
  SparseMatrix a = s_dd * system_.mass_ff() + s_0 * system_.stiffness_ff();
  if (system_.damped()) a += s_d * system_.damping_ff();
  if (analyses_ == 0) {
    ldlt_.analyzePattern(a);
    ++analyses_;
  }
  ldlt_.factorize(a);
  ++factorizations_;
  Eigen::VectorXd u;
  bool ok = ldlt_.info() == Eigen::Success;
  if (ok) {
    u = ldlt_.solve(rhs_free);
    ok = u.allFinite();
  }
  if (!ok) {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("space problem: singular operator (<lambda'' lambda> = " + std::to_string(s_dd) +
                               ", <lambda lambda> = " + std::to_string(s_0) + ")");
    u = lu.solve(rhs_free);
  }
  const double rn = rhs_free.norm();
  last_residual_ = rn > 0 ? (a * u - rhs_free).norm() / rn : 0.0;
  return u;
}

Eigen::MatrixXd nodal_load(const FieldST& delta, const GlobalContext& ctx) {
  return ctx.system->strain_op_free().transpose() * weight_space(delta, ctx.quad.space);
}

SpaceResult space_problem(const TimeFunction& lambda, const FieldST& delta, const GlobalContext& ctx,
                          SpaceSolver& solver) {
  return space_problem_nodal(lambda, nodal_load(delta, ctx), ctx, solver);
}

SpaceResult space_problem_nodal(const TimeFunction& lambda, const Eigen::MatrixXd& load, const GlobalContext& ctx,
                                SpaceSolver& solver) {
  const SpatialSystem& sys = *ctx.system;
  if (load.rows() != sys.num_free() || load.cols() != ctx.quad.num_time())
    throw std::invalid_argument("space problem: loading shape mismatch");
  const Eigen::VectorXd& wt = ctx.quad.time;
  const Eigen::VectorXd l0 = lambda.at_gauss(0);
  const double s_0 = (wt.array() * l0.array().square()).sum();
  if (!(s_0 > 0)) throw std::runtime_error("space problem: <lambda lambda> is not positive");
  const double s_d = (wt.array() * lambda.at_gauss(1).array() * l0.array()).sum();
  const double s_dd = (wt.array() * lambda.at_gauss(2).array() * l0.array()).sum();
  const Eigen::VectorXd rhs = load * wt.cwiseProduct(l0);
  SpaceResult r;
  if (rhs.squaredNorm() == 0) {
    r.u = Eigen::VectorXd::Zero(sys.mesh().num_dofs());
    r.eps = Eigen::VectorXd::Zero(sys.strain_op_free().rows());
    return r;
  }
  const Eigen::VectorXd uf = solver.solve(s_dd, s_d, s_0, rhs);
  r.u = sys.expand_free(uf);
  r.eps = sys.strain_op_free() * uf;
  return r;
}

Eigen::VectorXd stress_spatial(const Eigen::VectorXd& eps_bar, const TimeFunction& lambda, const TimeFunction& mu,
                               const FieldST& delta, const GlobalContext& ctx) {
  const Eigen::VectorXd& wt = ctx.quad.time;
  const Eigen::VectorXd mg = mu.at_gauss();
  const double mm = (wt.array() * mg.array().square()).sum();
  if (!(mm > 1e-300)) throw std::runtime_error("stress_spatial: degenerate mode (<mu mu> = 0)");
  const double ml = (wt.array() * mg.array() * lambda.at_gauss().array()).sum();
  const Eigen::VectorXd md = delta * wt.cwiseProduct(mg);
  return (apply_pointwise(ctx.hooke().stiffness(), eps_bar) * ml - md) / mm;
}

TimeFunction time_lambda(const Eigen::VectorXd& u_bar, const Eigen::VectorXd& eps_bar, const FieldST& delta,
                         const GlobalContext& ctx, MarchReport* report) {
  if (eps_bar.size() != delta.rows()) throw std::invalid_argument("time_lambda: shape mismatch");
  return time_lambda_nodal(u_bar, nodal_load(delta, ctx), ctx, report);
}

TimeFunction time_lambda_nodal(const Eigen::VectorXd& u_bar, const Eigen::MatrixXd& load, const GlobalContext& ctx,
                               MarchReport* report) {
  const SpatialSystem& sys = *ctx.system;
  const double a = u_bar.dot(sys.mass() * u_bar);
  const double b = u_bar.dot(sys.stiffness() * u_bar);
  const double c = sys.damped() ? u_bar.dot(sys.damping() * u_bar) : 0.0;
  const Eigen::VectorXd f = load.transpose() * sys.restrict_free(u_bar);
  if (a == 0 && b == 0 && c == 0) return TimeFunction(ctx.grid);
  return tdgm_march(ctx.grid, a, c, b, f, 0.0, ctx.scheme, report);
}

TimeFunction time_mu(const Eigen::VectorXd& sigma_bar, const Eigen::VectorXd& eps_bar, const TimeFunction& lambda,
                     const FieldST& delta, const GlobalContext& ctx) {
  const Eigen::VectorXd& ws = ctx.quad.space;
  const Eigen::VectorXd s = apply_pointwise(ctx.hooke().compliance(), sigma_bar);
  const double den = space_dot(s, sigma_bar, ws);
  if (!(den > 1e-300)) throw std::runtime_error("time_mu: degenerate mode (zero stress norm)");
  const double se = space_dot(sigma_bar, eps_bar, ws);
  const Eigen::VectorXd num = lambda.at_gauss() * se - delta.transpose() * weight_space(s, ws);
  return l2_fit(ctx.grid, num / den);
}

double normalize_mode(PgdMode& mode, const Eigen::VectorXd& w_space) {
  const double c = std::sqrt(space_norm2(mode.eps, Flavor::strain, w_space));
  if (!(c > 0)) throw std::runtime_error("normalize_mode: degenerate mode (zero strain norm)");
  mode.u /= c;
  mode.eps /= c;
  mode.sigma /= c;
  mode.lambda *= c;
  mode.mu *= c;
  return c;
}

double stagnation(const TimeFunction& current, const TimeFunction& previous) {
  if (current.grid() != previous.grid()) throw std::invalid_argument("stagnation: grid mismatch");
  const Eigen::ArrayXd a = current.at_gauss().array().abs();
  const Eigen::ArrayXd b = previous.at_gauss().array().abs();
  const Eigen::ArrayXd w = current.grid().gauss_weights().array();
  const double den = (w * (a + b).square()).sum();
  if (den == 0) return 0.0;
  return std::sqrt((w * (a - b).square()).sum() / den);
}

double mode_cre(const FieldST& delta, const PgdMode& mode, const GlobalContext& ctx) {
  FieldST x = delta;
  x.noalias() += mode.sigma * mode.mu.at_gauss().transpose();
  x.noalias() -= apply_pointwise(ctx.hooke().stiffness(), mode.eps) * mode.lambda.at_gauss().transpose();
  return st_compliance_energy(x, ctx.hooke(), ctx.quad);
}

EnrichResult enrich(const FieldST& delta, const GlobalContext& ctx, SpaceSolver& solver, std::mt19937_64& rng,
                    const EnrichParams& params) {
  return enrich(delta, nodal_load(delta, ctx), ctx, solver, rng, params);
}

EnrichResult enrich(const FieldST& delta, const Eigen::MatrixXd& load, const GlobalContext& ctx, SpaceSolver& solver,
                    std::mt19937_64& rng, const EnrichParams& params) {
  EnrichResult res(ctx.grid);
  if (delta.rows() != 6 * ctx.quad.num_space() || delta.cols() != ctx.quad.num_time())
    throw std::invalid_argument("enrich: loading term shape mismatch");
  if (!delta.allFinite()) throw std::runtime_error("enrich: non-finite loading term");
  if (!load.allFinite()) throw std::runtime_error("enrich: non-finite nodal loading");
  if (load.cwiseAbs().maxCoeff() == 0) return res;

  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd lc(ctx.grid.num_dofs()), mc(ctx.grid.num_dofs());
  for (Eigen::Index i = 0; i < lc.size(); ++i) lc[i] = uni(rng);
  for (Eigen::Index i = 0; i < mc.size(); ++i) mc[i] = uni(rng);
  TimeFunction lambda(ctx.grid, lc), mu(ctx.grid, mc);

  PgdMode& mode = res.mode;
  for (int it = 1; it <= params.max_iterations; ++it) {
    const SpaceResult sp = space_problem_nodal(lambda, load, ctx, solver);
    if (sp.u.squaredNorm() == 0) return res;
    mode.u = sp.u;
    mode.eps = sp.eps;
    mode.sigma = stress_spatial(mode.eps, lambda, mu, delta, ctx);
    mode.lambda = time_lambda_nodal(mode.u, load, ctx);
    if (mode.lambda.coefficients().squaredNorm() == 0) return res;
    mode.mu = time_mu(mode.sigma, mode.eps, mode.lambda, delta, ctx);
    res.norm_constant.push_back(normalize_mode(mode, ctx.quad.space));
    res.zeta.push_back(stagnation(mode.lambda, lambda));
    res.iterations = it;
    lambda = mode.lambda;
    mu = mode.mu;
    if (res.zeta.back() < params.zeta_stop) break;
  }
  // Close the stress pair on the final kinematic functions.
  if (mu.coefficients().squaredNorm() > 0) {
    mode.sigma = stress_spatial(mode.eps, mode.lambda, mode.mu, delta, ctx);
    mode.mu = time_mu(mode.sigma, mode.eps, mode.lambda, delta, ctx);
  }
  res.status = EnrichStatus::enriched;
  return res;
}

EnrichResult enrich(const FieldST& delta, const GlobalContext& ctx, std::uint64_t seed, const EnrichParams& params) {
  SpaceSolver solver(*ctx.system);
  std::mt19937_64 rng(seed);
  return enrich(delta, ctx, solver, rng, params);
}

void relax_mode(PgdMode& mode, double omega) {
  if (!(omega > 0 && omega <= 1)) throw std::invalid_argument("relax_mode: omega must lie in (0, 1]");
  mode.lambda *= omega;
  mode.mu *= omega;
}

namespace {

struct FamilyCompression {
  Eigen::MatrixXd space_coef;  // m x r
  Eigen::MatrixXd time_coef;   // m x r
  int rank = 0;
  double error = 0;
};

Eigen::MatrixXd r_factor(const Eigen::MatrixXd& a) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Index m = a.cols();
  const Eigen::Index k = std::min(a.rows(), m);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(k, m);
  r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return r;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& r) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cut = s.size() ? 1e-13 * s[0] : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > cut) inv[i] = 1.0 / s[i];
  return svd.matrixV().leftCols(s.size()) * inv.asDiagonal() * svd.matrixU().leftCols(s.size()).transpose();
}

// a_w, b_w: weighted spatial and temporal stacks (field = a_w b_w^T).
FamilyCompression compress_family(const Eigen::MatrixXd& a_w, const Eigen::MatrixXd& b_w, double tol, int max_rank) {
  const Eigen::MatrixXd ra = r_factor(a_w);
  const Eigen::MatrixXd rb = r_factor(b_w);
  Eigen::JacobiSVD<Eigen::MatrixXd> core(ra * rb.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = core.singularValues();
  const double total = s.squaredNorm();
  FamilyCompression out;
  int r = static_cast<int>(s.size());
  if (total > 0) {
    double tail = 0;
    while (r > 1 && tail + s[r - 1] * s[r - 1] <= tol * tol * total) {
      tail += s[r - 1] * s[r - 1];
      --r;
    }
    if (max_rank > 0 && r > max_rank) r = max_rank;
    out.error = std::sqrt(s.tail(s.size() - r).squaredNorm() / total);
  } else {
    r = 0;
  }
  out.rank = r;
  out.space_coef = pseudo_inverse(ra) * core.matrixU().leftCols(r);
  out.time_coef = pseudo_inverse(rb) * core.matrixV().leftCols(r) * s.head(r).asDiagonal();
  return out;
}

Eigen::MatrixXd weighted_space_stack(const Eigen::MatrixXd& x, const Eigen::Matrix<double, 6, 6>& metric,
                                     const Eigen::VectorXd& w_space) {
  const Eigen::Matrix<double, 6, 6> lt = metric.llt().matrixL().transpose();
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index g = 0; g < w_space.size(); ++g)
    out.middleRows<6>(6 * g) = std::sqrt(w_space[g]) * lt * x.middleRows<6>(6 * g);
  return out;
}

}  // namespace

CompressionReport compress_basis(PgdSolution& sol, const GlobalContext& ctx, double tol, int max_rank) {
  if (sol.num_modes() < 1) throw std::invalid_argument("compress_basis: no modes to compress");
  if (!(tol >= 0)) throw std::invalid_argument("compress_basis: tolerance must be non-negative");
  CompressionReport rep;
  rep.modes_before = sol.num_modes();
  const Eigen::VectorXd sqrt_wt = ctx.quad.time.cwiseSqrt();
  const Eigen::VectorXd& ws = ctx.quad.space;

  {
    const Eigen::MatrixXd a = weighted_space_stack(sol.eps_modes, ctx.hooke().stiffness(), ws);
    const Eigen::MatrixXd b = sqrt_wt.asDiagonal() * gauss_values(ctx.grid, sol.lambda);
    const FamilyCompression fc = compress_family(a, b, tol, max_rank);
    sol.u_modes = sol.u_modes * fc.space_coef;
    sol.eps_modes = sol.eps_modes * fc.space_coef;
    sol.lambda = sol.lambda * fc.time_coef;
    for (int i = 0; i < fc.rank; ++i) {
      const double c = std::sqrt(space_norm2(sol.eps_modes.col(i), Flavor::strain, ws));
      if (c > 0) {
        sol.u_modes.col(i) /= c;
        sol.eps_modes.col(i) /= c;
        sol.lambda.col(i) *= c;
      }
    }
    rep.kinematic_rank = fc.rank;
    rep.kinematic_error = fc.error;
  }
  if (sol.num_stress_modes() > 0) {
    const Eigen::MatrixXd a = weighted_space_stack(sol.sigma_modes, ctx.hooke().compliance(), ws);
    const Eigen::MatrixXd b = sqrt_wt.asDiagonal() * gauss_values(ctx.grid, sol.mu);
    const FamilyCompression fc = compress_family(a, b, tol, max_rank);
    sol.sigma_modes = sol.sigma_modes * fc.space_coef;
    sol.mu = sol.mu * fc.time_coef;
    rep.stress_rank = fc.rank;
    rep.stress_error = fc.error;
  }
  return rep;
}

}  // namespace latinpgd
