#include "wht/permanent.hpp"

#include <bit>
#include <cstdint>

namespace wht {

double permanent(const Eigen::MatrixXd& m) {
  require(m.rows() == m.cols(), "permanent: matrix must be square");
  const int n = static_cast<int>(m.rows());
  if (n > permanent_max_size) throw DomainError("permanent: size " + std::to_string(n) + " exceeds the limit");
  if (n == 0) return 1.0;
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(n);
  double total = 0.0;
  std::uint32_t gray = 0;
  for (std::uint32_t k = 1; k < (1u << n); ++k) {
    const std::uint32_t next = k ^ (k >> 1);
    const int j = std::countr_zero(next ^ gray);
    if (next & (1u << j)) rowsum += m.col(j); else rowsum -= m.col(j);
    gray = next;
    const double prod = rowsum.prod();
    total += (std::popcount(gray) % 2 == n % 2) ? prod : -prod;
  }
  return total;
}

} // namespace wht
