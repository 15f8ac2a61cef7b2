#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "gmaxent/error.hpp"
#include "gmaxent/model.hpp"

namespace gmaxent {

double Sampler::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Sampler::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

HermitianMatrix Sampler::random_hermitian(int dim, double scale) {
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = scale * Complex(normal(), normal());
  return HermitianMatrix::symmetrized(g);
}

Eigen::MatrixXcd Sampler::random_unitary(int dim) {
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(normal(), normal());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
  // Fix column phases so the distribution is Haar.
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const double magnitude = std::abs(r(j, j));
    if (magnitude > 0.0) q.col(j) *= r(j, j) / magnitude;
  }
  return q;
}

State Sampler::random_state(const ModelPtr& model) {
  switch (model->kind()) {
    case ModelKind::Classical: {
      Eigen::VectorXd p(model->dimension());
      for (int i = 0; i < p.size(); ++i) p(i) = std::exp(normal());
      return State(model, p / p.sum());
    }
    case ModelKind::Quantum: {
      const int d = model->dimension();
      Eigen::MatrixXcd g(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = Complex(normal(), normal());
      const Eigen::MatrixXcd ggt = g * g.adjoint();
      return State::from_density_matrix(model, HermitianMatrix::symmetrized(ggt / ggt.trace().real()));
    }
    case ModelKind::Polytope: {
      // Dirichlet(1, ..., 1) weights via normalized exponential variates.
      std::exponential_distribution<double> exponential(1.0);
      Eigen::VectorXd w(model->generator_count());
      for (int i = 0; i < w.size(); ++i) w(i) = exponential(engine_);
      w /= w.sum();
      return State(model, model->generators() * w);
    }
  }
  throw Error(ErrorCode::InvalidModel, "unknown model kind");
}

Effect Sampler::random_effect(const ModelPtr& model) {
  // Rescale a random functional g so that it spans [0, t] over the state
  // space: f = t (g - min g u) / (max g - min g). Works for every model since
  // u = 1 on states.
  const int n = model->ambient_dim();
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g(i) = normal();
  const EffectRange r = Effect::unchecked(model, g).range();
  const double t = uniform(0.2, 1.0);
  const double width = std::max(r.max - r.min, 1e-12);
  Eigen::VectorXd f = (g - r.min * model->unit()) * (t / width);
  return Effect::unchecked(model, std::move(f));
}

Observable Sampler::random_povm(const ModelPtr& model, int outcomes) {
  if (outcomes < 1) throw Error(ErrorCode::DegenerateInput, "a POVM needs at least one outcome");
  std::vector<Outcome> list;
  Eigen::VectorXd rest = model->unit();
  // k-1 random effects scaled by 1/(k-1) keep the remainder u - sum inside [0, u].
  for (int i = 0; i + 1 < outcomes; ++i) {
    Eigen::VectorXd f = random_effect(model).functional() / static_cast<double>(outcomes - 1);
    rest -= f;
    list.push_back({fmt::format("{}", i), Effect::unchecked(model, std::move(f)), static_cast<double>(i)});
  }
  list.push_back({fmt::format("{}", outcomes - 1), Effect::unchecked(model, std::move(rest)),
                  static_cast<double>(outcomes - 1)});
  return Observable(model, std::move(list));
}

std::vector<HermitianMatrix> Sampler::random_orthogonal_projectors(int dim, int count) {
  if (count < 1 || count > dim) throw Error(ErrorCode::DegenerateInput, "need 1 <= count <= dim projectors");
  const Eigen::MatrixXcd basis = random_unitary(dim);
  // Split a random subset of basis columns into `count` non-empty groups.
  const int used = std::uniform_int_distribution<int>(count, dim)(engine_);
  std::vector<int> cuts(used - 1);
  std::iota(cuts.begin(), cuts.end(), 1);
  std::shuffle(cuts.begin(), cuts.end(), engine_);
  cuts.resize(count - 1);
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), 0);
  cuts.push_back(used);

  std::vector<HermitianMatrix> projectors;
  for (int k = 0; k < count; ++k) {
    const Eigen::MatrixXcd cols = basis.middleCols(cuts[k], cuts[k + 1] - cuts[k]);
    projectors.push_back(HermitianMatrix::symmetrized(cols * cols.adjoint()));
  }
  return projectors;
}

}  // namespace gmaxent
