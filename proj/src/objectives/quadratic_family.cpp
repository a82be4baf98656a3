#include <Eigen/Dense>
#include <algorithm>
#include <random>

#include "csaga/error.hpp"
#include "csaga/objectives.hpp"

namespace csaga {

FiniteSumProblem make_quadratic_family(std::size_t n, std::size_t dim, double mu,
                                       double L, std::uint64_t seed) {
  if (n == 0 || dim == 0) throw Error("quadratic family: n and d must be positive");
  if (!(mu > 0.0) || !(L >= mu)) throw Error("quadratic family: need 0 < mu <= L");
  std::mt19937_64 rng(derive_seed(seed, Stream::synthetic));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> interior(mu, L);

  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<QuadraticComponent> comps;
  comps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) g(r, c) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();

    Eigen::VectorXd spectrum(d);
    spectrum(0) = mu;
    if (d > 1) spectrum(d - 1) = L;
    for (Eigen::Index j = 1; j + 1 < d; ++j) spectrum(j) = interior(rng);
    if (d == 1) spectrum(0) = (i % 2 == 0) ? mu : L;

    const Eigen::MatrixXd a = q * spectrum.asDiagonal() * q.transpose();
    std::vector<double> hessian(dim * dim);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c)
        hessian[static_cast<std::size_t>(r) * dim + static_cast<std::size_t>(c)] =
            0.5 * (a(r, c) + a(c, r));

    DenseVec center(dim);
    for (auto& v : center) v = normal(rng);
    comps.push_back(centered_quadratic(std::move(hessian), center));
  }
  return FiniteSumProblem::quadratic(std::move(comps), dim);
}

DenseVec random_point_at_distance(const DenseVec& center, double distance,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, Stream::synthetic) ^ 0x5bd1e995ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVec u(center.size());
  double len = 0.0;
  while (len == 0.0) {
    for (auto& v : u) v = normal(rng);
    len = norm(u);
  }
  DenseVec x = center;
  for (std::size_t j = 0; j < x.size(); ++j) x[j] += distance * u[j] / len;
  return x;
}

}  // namespace csaga
