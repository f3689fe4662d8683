// Exits 0 when dsyevr returns an accurate top eigenpair for a fixed symmetric matrix.
#include <lapacke.h>

#include <cmath>
#include <cstdint>
#include <vector>

int main() {
    const lapack_int n = 300;
    std::vector<double> a(n * n), m;
    std::uint64_t state = 0x9e3779b97f4a7c15ULL;
    for (lapack_int j = 0; j < n; ++j)
        for (lapack_int i = 0; i <= j; ++i) {
            state = state * 6364136223846793005ULL + 1442695040888963407ULL;
            const double v = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
            a[i + j * n] = a[j + i * n] = v;
        }
    m = a;
    std::vector<double> w(n), z(n);
    std::vector<lapack_int> support(2 * n);
    lapack_int found = 0;
    if (LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, a.data(), n, 0.0, 0.0, n, n, 0.0, &found, w.data(),
                       z.data(), n, support.data()) != 0)
        return 1;
    double res = 0.0, norm = 0.0;
    for (lapack_int i = 0; i < n; ++i) {
        double row = 0.0;
        for (lapack_int j = 0; j < n; ++j) row += m[i + j * n] * z[j];
        res += (row - w[0] * z[i]) * (row - w[0] * z[i]);
        norm += z[i] * z[i];
    }
    return std::sqrt(res) <= 1e-10 && std::abs(norm - 1.0) <= 1e-10 ? 0 : 1;
}
