#include "qdyn1d/tridiag.hpp"

#include <string>

extern "C" {
void dstedc_(const char* compz, const int* n, double* d, double* e, double* z, const int* ldz,
             double* work, const int* lwork, int* iwork, const int* liwork, int* info);
void dsterf_(const int* n, double* d, double* e, int* info);
}

namespace qdyn1d {

void tridiag_eigensystem(std::vector<double> d, std::vector<double> e,
                         std::vector<double>& eigenvalues, std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  if (n == 0) throw Error("tridiag_eigensystem: empty matrix");
  if (e.size() + 1 != d.size() && !(n == 1 && e.empty()))
    throw Error("tridiag_eigensystem: off-diagonal must have n-1 entries");

  z.assign(static_cast<size_t>(n) * n, 0.0);
  if (n == 1) {
    eigenvalues = d;
    z[0] = 1.0;
    return;
  }

  int info = 0;
  int lwork = -1, liwork = -1;
  double work_query = 0.0;
  int iwork_query = 0;
  dstedc_("I", &n, d.data(), e.data(), z.data(), &n, &work_query, &lwork, &iwork_query, &liwork,
          &info);
  if (info != 0) throw Error("dstedc workspace query failed, info=" + std::to_string(info));

  lwork = static_cast<int>(work_query);
  liwork = iwork_query;
  std::vector<double> work(static_cast<size_t>(lwork));
  std::vector<int> iwork(static_cast<size_t>(liwork));
  dstedc_("I", &n, d.data(), e.data(), z.data(), &n, work.data(), &lwork, iwork.data(), &liwork,
          &info);
  if (info != 0) throw Error("dstedc failed, info=" + std::to_string(info));
  eigenvalues = std::move(d);
}

std::vector<double> tridiag_eigenvalues(std::vector<double> d, std::vector<double> e) {
  const int n = static_cast<int>(d.size());
  if (n == 0) throw Error("tridiag_eigenvalues: empty matrix");
  if (n == 1) return d;
  int info = 0;
  dsterf_(&n, d.data(), e.data(), &info);
  if (info != 0) throw Error("dsterf failed, info=" + std::to_string(info));
  return d;
}

}  // namespace qdyn1d
