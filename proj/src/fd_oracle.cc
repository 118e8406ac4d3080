// Copyright 2026 The aicontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aic/fd_oracle.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "aic/errors.h"

namespace aic {

Vector CentralDifference(const ScalarFunction& f, const Vector& point,
                         double step) {
  if (!(step > 0.0)) throw ContractViolation("finite-difference step must be > 0");
  Vector grad(point.size());
  Vector x = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    const double hi = point[i] + step;
    const double lo = point[i] - step;
    x[i] = hi;
    const double fp = f(x);
    x[i] = lo;
    const double fm = f(x);
    x[i] = point[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw OracleFailure("non-finite function value at coordinate " +
                          std::to_string(i));
    }
    // The representable step, not the requested one.
    grad[i] = (fp - fm) / (hi - lo);
  }
  return grad;
}

// Scaled so that one threshold covers both regimes: a relative error of 1e-5
// for ordinary values, and an absolute error of 1e-8 below `small`.
double GradientError(double analytic, double numeric, double small) {
  const double diff = std::abs(analytic - numeric);
  if (std::abs(analytic) < small) return diff * (1e-5 / 1e-8);
  return diff / std::max(std::abs(analytic), std::abs(numeric));
}

namespace {

using Real = long double;

// Free energy re-evaluated in extended precision, written independently of
// the production code path. Differencing doubles of size |F| ~ 1e3 at
// h = 1e-6 would leave only ~1e-7 relative accuracy in the quotient.
Real LogDetExtended(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<Real> l(n * n, 0.0L);
  Real logdet = 0.0L;
  for (int j = 0; j < n; ++j) {
    Real d = m(j, j);
    for (int k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0.0L)) throw OracleFailure("precision not positive definite");
    const Real ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    logdet += 2.0L * std::log(ljj);
    for (int i = j + 1; i < n; ++i) {
      Real v = m(i, j);
      for (int k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = v / ljj;
    }
  }
  return logdet;
}

Real QuadraticExtended(const Matrix& m, const std::vector<Real>& e) {
  const int n = static_cast<int>(m.rows());
  Real q = 0.0L;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) q += e[i] * static_cast<Real>(m(i, j)) * e[j];
  }
  return q;
}

struct ExtendedInputs {
  Vector mu, mu_p, mu_pp, o, o_p, mu_d, beta;
  Matrix pi[4];
};

Real FreeEnergyExtended(const ExtendedInputs& x) {
  const int n = static_cast<int>(x.mu.size());
  std::vector<Real> e[4];
  for (auto& v : e) v.resize(n);
  for (int i = 0; i < n; ++i) {
    e[0][i] = static_cast<Real>(x.o[i]) - x.mu[i];
    e[1][i] = static_cast<Real>(x.o_p[i]) - x.mu_p[i];
    e[2][i] = static_cast<Real>(x.mu_p[i]) -
              static_cast<Real>(x.beta[i]) * (static_cast<Real>(x.mu_d[i]) - x.mu[i]);
    e[3][i] = static_cast<Real>(x.mu_pp[i]) +
              static_cast<Real>(x.beta[i]) * x.mu_p[i];
  }
  Real f = 0.0L;
  for (int b = 0; b < 4; ++b) {
    f += QuadraticExtended(x.pi[b], e[b]) - LogDetExtended(x.pi[b]);
  }
  return 0.5L * f;
}

struct RandomConfig {
  GeneralizedBelief belief;
  GeneralizedObservation obs;
  Target target;
  TemporalScale beta;
  PrecisionSet precisions;
};

PrecisionMatrix RandomPrecision(int n, bool dense, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> diag(0.1, 5.0);
  Vector d(n);
  for (int i = 0; i < n; ++i) d[i] = diag(rng);
  if (!dense || n == 1) return PrecisionMatrix::Diagonal(d);
  // Off-diagonals bounded by a fraction of the smaller diagonal keep the
  // matrix diagonally dominant, hence positive definite.
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix m = d.asDiagonal();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v =
          unit(rng) * 0.9 * std::min(d[i], d[j]) / static_cast<double>(n);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return PrecisionMatrix::Dense(m);
}

RandomConfig MakeConfig(int n, bool dense, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  std::uniform_real_distribution<double> beta(0.5, 2.0);
  auto vec = [&]() {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = entry(rng);
    return v;
  };
  RandomConfig c;
  c.belief = {vec(), vec(), vec()};
  c.obs = {vec(), vec()};
  c.target = {vec()};
  c.beta.beta.resize(n);
  for (int i = 0; i < n; ++i) c.beta.beta[i] = beta(rng);
  c.precisions = {RandomPrecision(n, dense, rng), RandomPrecision(n, dense, rng),
                  RandomPrecision(n, dense, rng), RandomPrecision(n, dense, rng)};
  return c;
}

std::string Dump(const RandomConfig& c) {
  std::ostringstream os;
  const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, ", ",
                            "; ", "", "", "[", "]");
  os << "n=" << c.belief.size() << " mu=" << c.belief.mu.transpose().format(fmt)
     << " mu_p=" << c.belief.mu_p.transpose().format(fmt)
     << " mu_pp=" << c.belief.mu_pp.transpose().format(fmt)
     << " o=" << c.obs.o.transpose().format(fmt)
     << " o_p=" << c.obs.o_p.transpose().format(fmt)
     << " mu_d=" << c.target.mu_d.transpose().format(fmt)
     << " beta=" << c.beta.beta.transpose().format(fmt)
     << " pi_o=" << c.precisions.pi_o.dense().format(fmt)
     << " pi_op=" << c.precisions.pi_op.dense().format(fmt)
     << " pi_mu=" << c.precisions.pi_mu.dense().format(fmt)
     << " pi_mup=" << c.precisions.pi_mup.dense().format(fmt);
  return os.str();
}

ExtendedInputs ToInputs(const RandomConfig& c) {
  return {c.belief.mu,
          c.belief.mu_p,
          c.belief.mu_pp,
          c.obs.o,
          c.obs.o_p,
          c.target.mu_d,
          c.beta.beta,
          {c.precisions.pi_o.dense(), c.precisions.pi_op.dense(),
           c.precisions.pi_mu.dense(), c.precisions.pi_mup.dense()}};
}

// f(x) - f(x0) in extended precision, rounded to double only at the end, so
// the cancellation in the central difference happens before rounding.
ScalarFunction Relative(std::function<ExtendedInputs(const Vector&)> make,
                        const Vector& x0) {
  const Real f0 = FreeEnergyExtended(make(x0));
  return [make = std::move(make), f0](const Vector& x) {
    return static_cast<double>(FreeEnergyExtended(make(x)) - f0);
  };
}

double WorstError(const Vector& analytic, const Vector& numeric) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    worst = std::max(worst, GradientError(analytic[i], numeric[i]));
  }
  return worst;
}

double BeliefFamilyError(const RandomConfig& c, double step, bool flip) {
  const int n = c.belief.size();
  const ErrorSet e = ComputeErrors(c.belief, c.obs, c.target, c.beta);
  const BeliefGradient g = GradBelief(e, c.precisions, c.beta);
  Vector analytic(3 * n);
  analytic << g.d_mu, g.d_mu_p, g.d_mu_pp;
  if (flip) analytic = -analytic;
  Vector x0(3 * n);
  x0 << c.belief.mu, c.belief.mu_p, c.belief.mu_pp;
  const ExtendedInputs base = ToInputs(c);
  const ScalarFunction f = Relative(
      [base, n](const Vector& x) {
        ExtendedInputs in = base;
        in.mu = x.segment(0, n);
        in.mu_p = x.segment(n, n);
        in.mu_pp = x.segment(2 * n, n);
        return in;
      },
      x0);
  return WorstError(analytic, CentralDifference(f, x0, step));
}

double BetaFamilyError(const RandomConfig& c, double step) {
  const ErrorSet e = ComputeErrors(c.belief, c.obs, c.target, c.beta);
  const Vector analytic = GradBeta(e, c.precisions, c.belief, c.target);
  const ExtendedInputs base = ToInputs(c);
  const ScalarFunction f = Relative(
      [base](const Vector& b) {
        ExtendedInputs in = base;
        in.beta = b;
        return in;
      },
      c.beta.beta);
  return WorstError(analytic, CentralDifference(f, c.beta.beta, step));
}

// Perturbs the symmetric pair (i, j), (j, i) together, so the numeric
// derivative equals G_ij + G_ji off the diagonal and G_ii on it.
double PrecisionFamilyError(const RandomConfig& c, double step) {
  const ErrorSet e = ComputeErrors(c.belief, c.obs, c.target, c.beta);
  const PrecisionGradient g = GradPrecision(e, c.precisions);
  const int n = c.belief.size();
  const Matrix* analytic[4] = {&g.pi_o, &g.pi_op, &g.pi_mu, &g.pi_mup};
  const ExtendedInputs base = ToInputs(c);
  double worst = 0.0;
  for (int block = 0; block < 4; ++block) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const ScalarFunction f = Relative(
            [base, block, i, j](const Vector& x) {
              ExtendedInputs in = base;
              in.pi[block](i, j) += x[0];
              if (i != j) in.pi[block](j, i) += x[0];
              return in;
            },
            Vector::Zero(1));
        const double numeric = CentralDifference(f, Vector::Zero(1), step)[0];
        const Matrix& a = *analytic[block];
        const double expected = (i == j) ? a(i, i) : a(i, j) + a(j, i);
        worst = std::max(worst, GradientError(expected, numeric));
      }
    }
  }
  return worst;
}

}  // namespace

std::vector<GradcheckFamilyResult> RunGradcheck(
    const GradcheckOptions& options) {
  std::mt19937_64 rng(options.seed);
  GradcheckFamilyResult belief, precision, beta;
  belief.family = "belief";
  precision.family = "precision";
  beta.family = "beta";
  for (int n : options.dimensions) {
    for (int k = 0; k < options.configurations_per_dimension; ++k) {
      const RandomConfig c = MakeConfig(n, /*dense=*/k % 4 == 3, rng);
      const double eb = BeliefFamilyError(c, options.step, options.inject_sign_flip);
      const double ep = PrecisionFamilyError(c, options.step);
      const double et = BetaFamilyError(c, options.step);
      for (auto [result, err] :
           {std::pair{&belief, eb}, std::pair{&precision, ep},
            std::pair{&beta, et}}) {
        ++result->configurations;
        if (err > result->worst_error || result->worst_configuration.empty()) {
          result->worst_error = std::max(result->worst_error, err);
          result->worst_configuration = Dump(c);
        }
      }
    }
  }
  return {belief, precision, beta};
}

}  // namespace aic
