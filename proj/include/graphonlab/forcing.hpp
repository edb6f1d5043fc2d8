#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "graphonlab/densall.hpp"
#include "graphonlab/density.hpp"
#include "graphonlab/rng.hpp"
#include "graphonlab/smallgraph.hpp"
#include "graphonlab/spectral.hpp"
#include "graphonlab/step.hpp"

namespace graphonlab {

struct RankFailure : std::runtime_error {
  explicit RankFailure(const std::string& what) : std::runtime_error(what) {}
};
struct LayoutError : std::invalid_argument {
  explicit LayoutError(const std::string& what) : std::invalid_argument(what) {}
};
struct NewtonDivergence : std::runtime_error {
  explicit NewtonDivergence(const std::string& what) : std::runtime_error(what) {}
};

// Connected graphs H_1..H_m on 2..n vertices together with indicator step
// graphons W_1..W_m whose density vectors are linearly independent; the
// witnesses have no all-one diagonal structure, so each has omega = 0.
struct ELSFamily {
  int n = 0;
  std::vector<SmallGraph> graphs;
  std::vector<StepPtr> witnesses;
  std::vector<std::vector<Rational>> density_matrix;  // [i][j] = d(H_i, W_j)

  int m() const { return int(graphs.size()); }
};

namespace detail {

constexpr uint64_t kRankPrime = (1ULL << 61) - 1;

inline uint64_t mod_mul(uint64_t a, uint64_t b) {
  return (uint64_t)((unsigned __int128)a * b % kRankPrime);
}
inline uint64_t mod_pow(uint64_t base, uint64_t exp) {
  uint64_t r = 1;
  while (exp) {
    if (exp & 1) r = mod_mul(r, base);
    base = mod_mul(base, base);
    exp >>= 1;
  }
  return r;
}
inline uint64_t mod_of_rational(const Rational& q) {
  int128 num = q.num() % (int128)kRankPrime;
  if (num < 0) num += kRankPrime;
  uint64_t den = uint64_t(q.den() % (int128)kRankPrime);
  return mod_mul(uint64_t(num), mod_pow(den, kRankPrime - 2));
}

// Rank of a rational matrix certified over GF(2^61 - 1). Full modular rank
// certifies full rational rank; a modular rank drop can only underestimate.
inline int modular_rank(const std::vector<std::vector<Rational>>& rows, size_t cols) {
  std::vector<std::vector<uint64_t>> a;
  for (const auto& row : rows) {
    std::vector<uint64_t> r;
    for (const auto& v : row) r.push_back(mod_of_rational(v));
    a.push_back(std::move(r));
  }
  int rank = 0;
  for (size_t col = 0; col < cols && rank < int(a.size()); ++col) {
    size_t pivot = rank;
    while (pivot < a.size() && a[pivot][col] == 0) ++pivot;
    if (pivot == a.size()) continue;
    std::swap(a[rank], a[pivot]);
    uint64_t inv = mod_pow(a[rank][col], kRankPrime - 2);
    for (size_t row = 0; row < a.size(); ++row) {
      if (int(row) == rank || a[row][col] == 0) continue;
      uint64_t factor = mod_mul(a[row][col], inv);
      for (size_t c2 = col; c2 < cols; ++c2) {
        uint64_t sub = mod_mul(factor, a[rank][c2]);
        a[row][c2] = (a[row][c2] + kRankPrime - sub) % kRankPrime;
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace detail

// Indicator step graphon of H on parts of the given measures plus a zero
// remainder part.
inline StepPtr indicator_graphon(const SmallGraph& h, const std::vector<Rational>& sizes) {
  int k = h.order();
  if (int(sizes.size()) != k) throw std::invalid_argument("one size per vertex expected");
  Rational rest(1);
  for (const auto& s : sizes) rest -= s;
  if (rest.sign() <= 0) throw std::invalid_argument("sizes must leave a positive remainder");
  std::vector<Rational> measures = sizes;
  measures.push_back(rest);
  std::vector<std::vector<Rational>> values(k + 1, std::vector<Rational>(k + 1, Rational(0)));
  for (int u = 0; u < k; ++u)
    for (int v = 0; v < k; ++v)
      if (h.has_edge(u, v)) values[u][v] = Rational(1);
  return step_graphon(std::move(measures), std::move(values));
}

// Randomized construction of the family: sample indicator graphons with part
// sizes in (0.1, 0.3) until the m density vectors are linearly independent.
// Independence is certified by exact modular rank; on top of that a candidate
// must keep a healthy angle to the span of the accepted rows, otherwise the
// downstream Newton systems are numerically useless.
inline ELSFamily els_family(int n, uint64_t seed) {
  if (n < 3 || n > 4) throw SizeError("els_family supports n in {3, 4}");
  ELSFamily fam;
  fam.n = n;
  fam.graphs = enumerate_connected(n);
  int m = fam.m();
  Rng rng = Rng::stream(seed, 0xe15);

  std::vector<std::vector<Rational>> vectors;      // accepted density rows
  std::vector<Eigen::VectorXd> orthonormal_basis;  // of the normalized rows
  int trials = 0;
  size_t next_graph = 0;
  while (int(fam.witnesses.size()) < m) {
    if (++trials > 10'000)
      throw RankFailure("no independent family after 10000 candidates");
    const SmallGraph& h = fam.graphs[next_graph];
    std::vector<Rational> sizes;
    Rational total(0);
    for (int v = 0; v < h.order(); ++v) {
      Rational s(7 + (long long)rng.below(13), 64);  // (0.1, 0.3) grid of 1/64ths
      sizes.push_back(s);
      total += s;
    }
    if (total >= Rational(1)) continue;
    StepPtr candidate = indicator_graphon(h, sizes);
    std::vector<Rational> row;
    for (const auto& g : fam.graphs) row.push_back(induced_density_rational(g, *candidate));

    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = row[i].to_double();
    v.normalize();
    Eigen::VectorXd residual = v;
    for (const auto& b : orthonormal_basis) residual -= residual.dot(b) * b;
    if (residual.norm() < 0.05) {
      next_graph = (next_graph + 1) % fam.graphs.size();
      continue;
    }
    vectors.push_back(row);
    if (detail::modular_rank(vectors, m) == int(vectors.size())) {
      orthonormal_basis.push_back(residual.normalized());
      fam.witnesses.push_back(candidate);
      fam.density_matrix.push_back(std::move(row));
    } else {
      vectors.pop_back();
    }
    next_graph = (next_graph + 1) % fam.graphs.size();
  }
  return fam;
}

// Block-diagonal arrangement: the m witnesses plus the all-one graphon, each
// on a (1-eps')/(m+2) slice, followed by zero slack. The tail [1-eps', 1)
// stays inside the final zero slice.
struct AssembledGraphon {
  StepPtr w;
  std::vector<std::pair<size_t, size_t>> block_parts;  // [first, last] per block
  size_t zero_part = 0;
  Rational eps_prime;
  int m = 0;
};

inline AssembledGraphon assemble_wf(const ELSFamily& fam, Rational eps_prime = Rational(0)) {
  int m = fam.m();
  if (eps_prime < Rational(0) || eps_prime >= Rational(1, m + 2))
    throw std::invalid_argument("eps' must lie in [0, 1/(m+2))");
  Rational slice = (Rational(1) - eps_prime) / Rational(m + 2);
  AssembledGraphon out;
  out.eps_prime = eps_prime;
  out.m = m;
  std::vector<Rational> measures;
  std::vector<size_t> block_of_part;
  for (int i = 0; i < m; ++i) {
    size_t first = measures.size();
    for (size_t p = 0; p < fam.witnesses[i]->parts(); ++p) {
      measures.push_back(fam.witnesses[i]->measure(p) * slice);
      block_of_part.push_back(i);
    }
    out.block_parts.emplace_back(first, measures.size() - 1);
  }
  out.block_parts.emplace_back(measures.size(), measures.size());
  measures.push_back(slice);  // the all-one block
  block_of_part.push_back(m);
  out.zero_part = measures.size();
  Rational rest(1);
  for (const auto& mu : measures) rest -= mu;
  measures.push_back(rest);
  block_of_part.push_back(m + 1);

  size_t total = measures.size();
  std::vector<std::vector<Rational>> values(total, std::vector<Rational>(total, Rational(0)));
  for (int i = 0; i < m; ++i) {
    auto [first, last] = out.block_parts[i];
    for (size_t a = first; a <= last; ++a)
      for (size_t b = first; b <= last; ++b)
        values[a][b] = fam.witnesses[i]->block(a - first, b - first);
  }
  values[out.zero_part - 1][out.zero_part - 1] = Rational(1);  // the all-one block
  out.w = step_graphon(std::move(measures), std::move(values));
  return out;
}

// Stretch vector: target widths s_i (fractions of the 1-eps' region) for the
// m+1 carrying blocks.
struct StretchVector {
  std::vector<Rational> s;
  Rational eps_prime;
};

inline AssembledGraphon stretch(const AssembledGraphon& w, const StretchVector& sv) {
  int m = w.m;
  if (int(sv.s.size()) != m + 1) throw LayoutError("stretch vector needs m+1 entries");
  if (sv.eps_prime != w.eps_prime) throw LayoutError("mismatched eps'");
  Rational sum(0);
  for (const auto& si : sv.s) {
    if (si.sign() <= 0) throw LayoutError("stretch entries must be positive");
    sum += si;
  }
  if (sum >= Rational(1)) throw LayoutError("stretch entries must sum below 1");
  Rational uniform = Rational(1, m + 2);
  AssembledGraphon out = w;
  const StepGraphon& base = *w.w;
  std::vector<Rational> measures;
  for (size_t p = 0; p < base.parts(); ++p) measures.push_back(base.measure(p));
  for (int i = 0; i <= m; ++i) {
    auto [first, last] = w.block_parts[i];
    Rational factor = sv.s[i] / uniform;
    for (size_t p = first; p <= last; ++p) measures[p] = base.measure(p) * factor;
  }
  Rational rest(1);
  for (size_t p = 0; p < base.parts(); ++p)
    if (p != w.zero_part) rest -= measures[p];
  if (rest.sign() <= 0) throw LayoutError("stretch leaves no slack");
  measures[w.zero_part] = rest;
  std::vector<std::vector<Rational>> values(base.parts(),
                                            std::vector<Rational>(base.parts()));
  for (size_t a = 0; a < base.parts(); ++a)
    for (size_t b = 0; b < base.parts(); ++b) values[a][b] = base.block(a, b);
  out.w = step_graphon(std::move(measures), std::move(values));
  return out;
}

// d(H_i, W_s) for connected H_i in the block-diagonal layout: only
// assignments inside one carrying block contribute.
inline double stretched_density(const ELSFamily& fam, int graph_idx, const std::vector<double>& s,
                                double eps_prime) {
  const SmallGraph& h = fam.graphs[graph_idx];
  int k = h.order();
  KahanSum total;
  for (int j = 0; j < fam.m(); ++j)
    total.add(std::pow(s[j] * (1.0 - eps_prime), k) *
              fam.density_matrix[j][graph_idx].to_double());
  bool complete = h.edge_count() == k * (k - 1) / 2;
  if (complete) total.add(std::pow(s[fam.m()] * (1.0 - eps_prime), k));
  return total.value();
}

// Central finite differences of the stretched densities, step 1e-5.
inline Eigen::MatrixXd density_jacobian(const ELSFamily& fam, const std::vector<double>& s,
                                        double eps_prime, double step = 1e-5) {
  int m = fam.m();
  Eigen::MatrixXd jac(m, m);
  for (int j = 0; j < m; ++j) {
    std::vector<double> hi = s, lo = s;
    hi[j] += step;
    lo[j] -= step;
    for (int i = 0; i < m; ++i)
      jac(i, j) =
          (stretched_density(fam, i, hi, eps_prime) - stretched_density(fam, i, lo, eps_prime)) /
          (2.0 * step);
  }
  return jac;
}

struct MatchResult {
  std::vector<double> s;  // m+1 entries, last pinned to the achieved z
  int iterations = 0;
  double residual = 0.0;
  double z_achieved = 0.0;
};

namespace detail {

// One damped Newton solve of d(H_i, W_s) = target with s[m] pinned; the line
// search contracts the 2-norm of the residual vector.
inline bool newton_leg(const ELSFamily& fam, double eps_prime,
                       const std::vector<double>& target, std::vector<double>& s,
                       int max_iterations, double tol, int* iterations, double* residual) {
  int m = fam.m();
  auto fvec = [&](const std::vector<double>& sv) {
    Eigen::VectorXd f(m);
    for (int i = 0; i < m; ++i) f(i) = stretched_density(fam, i, sv, eps_prime) - target[i];
    return f;
  };
  Eigen::VectorXd f = fvec(s);
  for (int it = 0; it < max_iterations; ++it) {
    *iterations += 1;
    *residual = f.cwiseAbs().maxCoeff();
    if (*residual <= tol) return true;
    Eigen::MatrixXd jac = density_jacobian(fam, s, eps_prime);
    Eigen::VectorXd delta = jac.partialPivLu().solve(f);
    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40 && !accepted; ++half) {
      std::vector<double> trial = s;
      bool positive = true;
      for (int j = 0; j < m; ++j) {
        trial[j] -= step * delta(j);
        if (!(trial[j] > 0.0 && trial[j] < 1.0)) positive = false;
      }
      if (positive) {
        Eigen::VectorXd ftrial = fvec(trial);
        if (ftrial.norm() < f.norm() * (1.0 - 0.25 * step)) {
          s = trial;
          f = ftrial;
          accepted = true;
        }
      }
      step *= 0.5;
    }
    if (!accepted) return false;
  }
  return false;
}

}  // namespace detail

// Matches d(H_i, W_s) to the uniform-layout densities with the last
// coordinate pinned to z. The solution curve can be steep in near-singular
// directions of the density matrix and the admissible ball around the
// uniform layout is instance dependent, so z is walked by continuation with
// warm starts and adaptive steps; the walk stops where the solution would
// leave the ball and reports the z it reached. Any achieved z above
// 1/(m+2) still certifies a positive gap downstream.
inline MatchResult match_densities(const ELSFamily& fam, double eps_prime, double z,
                                   int max_iterations = 100, double tol = 1e-12) {
  int m = fam.m();
  double uniform = 1.0 / double(m + 2);
  double ball_hi = 1.0 / double(m + 1);
  std::vector<double> target(m);
  {
    std::vector<double> s0(m + 1, uniform);
    for (int i = 0; i < m; ++i) target[i] = stretched_density(fam, i, s0, eps_prime);
  }
  MatchResult res;
  res.s.assign(m + 1, uniform);
  res.z_achieved = uniform;
  if (z <= uniform) {
    res.s[m] = z;
    res.z_achieved = z;
    if (!detail::newton_leg(fam, eps_prime, target, res.s, max_iterations, tol,
                            &res.iterations, &res.residual))
      throw NewtonDivergence("no convergence at z below the uniform layout");
    return res;
  }
  double cur = uniform;
  double step = (z - uniform) / 16.0;
  double min_step = (z - uniform) * 1e-7;
  while (cur < z && step >= min_step) {
    double next = std::min(z, cur + step);
    std::vector<double> trial = res.s;
    trial[m] = next;
    int leg_iters = 0;
    double leg_resid = 0.0;
    bool ok = detail::newton_leg(fam, eps_prime, target, trial, max_iterations, tol,
                                 &leg_iters, &leg_resid);
    for (int j = 0; j < m && ok; ++j)
      if (!(trial[j] > 0.0 && trial[j] < ball_hi)) ok = false;
    res.iterations += leg_iters;
    if (ok) {
      res.s = trial;
      res.residual = leg_resid;
      res.z_achieved = next;
      cur = next;
    } else {
      step *= 0.5;
    }
  }
  if (!(res.z_achieved > uniform))
    throw NewtonDivergence("no admissible stretch above the uniform layout");
  return res;
}

struct GapVerdict {
  Rational omega_w;
  Rational omega_wprime;
  Rational gap;
  double gap_lower_bound = 0.0;
  std::string verdict;
};

// omega comparison of the matched pair; a positive gap certifies the pair is
// not weakly isomorphic.
inline GapVerdict verify_gap(const AssembledGraphon& w, const AssembledGraphon& wprime,
                             double z) {
  GapVerdict out;
  out.omega_w = omega(*w.w);
  out.omega_wprime = omega(*wprime.w);
  out.gap = out.omega_wprime - out.omega_w;
  int m = w.m;
  out.gap_lower_bound = (z * (m + 2) - 1.0) / double((m + 2) * (m + 4));
  out.verdict = out.gap.sign() > 0 ? "not weakly isomorphic" : "indistinguishable by omega";
  return out;
}

struct ForcingCertificate {
  int n = 0;
  int m = 0;
  double z = 0.0;            // the z actually certified
  double z_requested = 0.0;  // differs when the admissible ball capped it
  Rational eps_prime;
  int newton_iterations = 0;
  double newton_residual = 0.0;
  std::vector<std::string> class_names;  // all isomorphism classes of order <= n
  std::vector<double> densities_w;
  std::vector<double> densities_wprime;
  double max_density_gap = 0.0;
  GapVerdict gap;
  AssembledGraphon w;
  AssembledGraphon wprime;
  bool degenerate_z = false;
};

// The full pipeline: build the family, assemble the block graphon, match all
// connected densities at a stretched layout pinned to z, and certify the
// omega gap. Densities of disconnected classes follow from the decomposition
// into connected ones.
inline ForcingCertificate forcing_experiment(int n, uint64_t seed, double z = 0.0) {
  ForcingCertificate cert;
  cert.n = n;
  ELSFamily fam = els_family(n, seed);
  int m = fam.m();
  cert.m = m;
  double uniform = 1.0 / double(m + 2);
  cert.z = z == 0.0 ? uniform + 1e-3 : z;
  cert.z_requested = cert.z;

  // shrink eps' until the finite-difference Jacobian at the uniform layout is
  // comfortably invertible (it is on the first try for these instances)
  Rational eps_prime(1, m + 4);
  for (int attempt = 0; attempt < 12; ++attempt) {
    std::vector<double> s0(m + 1, uniform);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        density_jacobian(fam, s0, eps_prime.to_double()));
    double cond = svd.singularValues()(0) / svd.singularValues()(m - 1);
    if (std::isfinite(cond) && cond < 1e12) break;
    eps_prime = eps_prime / Rational(2);
  }
  cert.eps_prime = eps_prime;
  cert.w = assemble_wf(fam, eps_prime);

  StretchVector sv;
  sv.eps_prime = eps_prime;
  if (cert.z == uniform) {
    cert.degenerate_z = true;
    sv.s.assign(m + 1, Rational(1, m + 2));
    cert.wprime = stretch(cert.w, sv);
  } else {
    MatchResult match = match_densities(fam, eps_prime.to_double(), cert.z);
    cert.newton_iterations = match.iterations;
    cert.newton_residual = match.residual;
    cert.z = match.z_achieved;
    for (double si : match.s) sv.s.push_back(Rational::from_double_exact(si));
    cert.wprime = stretch(cert.w, sv);
  }

  // densities of every isomorphism class of order <= n, on both graphons
  std::vector<double> s_w(m + 1, uniform);
  std::vector<double> s_wp;
  for (const auto& si : sv.s) s_wp.push_back(si.to_double());
  auto connected_density = [&](const std::vector<double>& s, const SmallGraph& h) {
    if (h.order() == 1) return 1.0;
    for (int i = 0; i < m; ++i)
      if (isomorphic(h, fam.graphs[i]))
        return stretched_density(fam, i, s, eps_prime.to_double());
    throw std::logic_error("connected class not in the family: " + h.str());
  };
  for (int order = 1; order <= n; ++order) {
    for (const auto& h : enumerate_all(order)) {
      cert.class_names.push_back(h.str());
      auto poly = densall_decompose(h);
      double dw = poly.evaluate<double>(
          [&](const SmallGraph& g) { return connected_density(s_w, g); });
      double dwp = poly.evaluate<double>(
          [&](const SmallGraph& g) { return connected_density(s_wp, g); });
      cert.densities_w.push_back(dw);
      cert.densities_wprime.push_back(dwp);
      cert.max_density_gap = std::max(cert.max_density_gap, std::abs(dw - dwp));
    }
  }
  cert.gap = verify_gap(cert.w, cert.wprime, cert.z);
  return cert;
}

}  // namespace graphonlab
