#include "hyperlat/short_vectors.hpp"

#include <algorithm>
#include <stdexcept>

namespace hyperlat {

namespace {

Int round_rat(const Rat& x) {
  // nearest integer, ties toward -inf
  Int num = x.get_num(), den = x.get_den();
  return fdiv_q(2 * num + den, 2 * den);
}

struct Gso {
  std::vector<std::vector<Rat>> mu;
  std::vector<Rat> B;
};

Gso gso_of(const QMat& g) {
  const std::size_t n = g.rows();
  Gso s;
  s.mu.assign(n, std::vector<Rat>(n, Rat(0)));
  s.B.assign(n, Rat(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      Rat m = g(i, j);
      for (std::size_t k = 0; k < j; ++k)
        m -= s.mu[i][k] * s.mu[j][k] * s.B[k];
      if (s.B[j] == 0) throw std::domain_error("lll_gram: not definite");
      s.mu[i][j] = m / s.B[j];
    }
    Rat b = g(i, i);
    for (std::size_t k = 0; k < i; ++k)
      b -= s.mu[i][k] * s.mu[i][k] * s.B[k];
    s.B[i] = b;
    if (b <= 0) throw std::domain_error("lll_gram: not positive definite");
  }
  return s;
}

}  // namespace

IMat lll_gram(const IMat& gram, IMat* transform) {
  const std::size_t n = gram.rows();
  IMat u = IMat::identity(n);
  IMat g = gram;
  auto regram = [&]() { g = u * gram * u.transposed(); };
  const Rat delta(3, 4);
  std::size_t k = 1;
  std::size_t guard = 0;
  while (k < n) {
    if (++guard > 100000) throw std::logic_error("lll_gram: no convergence");
    Gso s = gso_of(to_rat(g));
    for (std::size_t j = k; j-- > 0;) {
      Int q = round_rat(s.mu[k][j]);
      if (q != 0) {
        for (std::size_t c = 0; c < n; ++c) u(k, c) -= q * u(j, c);
        regram();
        s = gso_of(to_rat(g));
      }
    }
    if (s.B[k] >= (delta - s.mu[k][k - 1] * s.mu[k][k - 1]) * s.B[k - 1]) {
      ++k;
    } else {
      for (std::size_t c = 0; c < n; ++c) std::swap(u(k, c), u(k - 1, c));
      regram();
      k = k > 1 ? k - 1 : 1;
    }
  }
  if (transform) *transform = u;
  return g;
}

std::vector<ShortVector> short_vectors(const IMat& gram, const Int& bound) {
  const std::size_t n = gram.rows();
  if (n == 0) return {};
  IMat u;
  IMat g = lll_gram(gram, &u);
  QMat q = to_rat(g);
  // Fincke-Pohst quadratic completion: Q(x) = sum_i d_i (x_i + sum_{j>i} m_ij x_j)^2
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) q(j, i) = q(i, j);
    for (std::size_t j = i + 1; j < n; ++j) q(i, j) = q(i, j) / q(i, i);
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t l = k; l < n; ++l) q(k, l) -= q(k, i) * q(i, l);
  }
  std::vector<ShortVector> out;
  IVec x(n, Int(0));
  // Depth-first from the last coordinate; exact rational bound tests.
  std::function<void(std::size_t, Rat)> rec = [&](std::size_t lvl, Rat budget) {
    std::size_t i = lvl - 1;
    Rat center(0);
    for (std::size_t j = i + 1; j < n; ++j) center += q(i, j) * Rat(x[j]);
    Int x0 = round_rat(-center);
    auto weight = [&](const Int& xi) -> Rat {
      Rat t = Rat(xi) + center;
      return q(i, i) * t * t;
    };
    for (int dir = 0; dir < 2; ++dir) {
      Int xi = dir == 0 ? x0 : x0 - 1;
      while (true) {
        Rat w = weight(xi);
        if (w > budget) break;
        x[i] = xi;
        if (i == 0) {
          bool zero = true;
          for (const auto& e : x)
            if (e != 0) {
              zero = false;
              break;
            }
          if (!zero) {
            // canonical sign: first nonzero entry positive
            IVec y(n);
            bool flip = false;
            for (std::size_t j = 0; j < n; ++j)
              if (x[j] != 0) {
                flip = x[j] < 0;
                break;
              }
            for (std::size_t j = 0; j < n; ++j) y[j] = flip ? -x[j] : x[j];
            // map back through the LLL transform: vectors are rows y * u
            IVec z(n, Int(0));
            for (std::size_t c = 0; c < n; ++c)
              for (std::size_t j = 0; j < n; ++j) z[c] += y[j] * u(j, c);
            Int norm = dot(z, gram, z);
            out.push_back({z, norm});
          }
        } else {
          rec(i, budget - w);
        }
        xi += dir == 0 ? 1 : -1;
      }
    }
    x[i] = 0;
  };
  rec(n, Rat(bound));
  // dedup (sign canonicalization can produce duplicates across branches)
  std::sort(out.begin(), out.end(), [](const ShortVector& a, const ShortVector& b) {
    return a.v < b.v;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const ShortVector& a, const ShortVector& b) {
                          return a.v == b.v;
                        }),
            out.end());
  return out;
}

std::vector<IVec> vectors_of_norm(const IMat& gram, const Int& norm) {
  std::vector<IVec> res;
  if (norm == 0) return res;
  if (norm < 0) throw std::domain_error("vectors_of_norm: need positive norm");
  for (auto& sv : short_vectors(gram, norm))
    if (sv.norm == norm) res.push_back(sv.v);
  return res;
}

}  // namespace hyperlat
