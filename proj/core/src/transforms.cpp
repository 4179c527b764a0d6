#include "sketchls/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include "sketchls/errors.hpp"

namespace sketchls {

namespace {

bool is_pow2(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

void fwht_span(double* v, std::size_t n) {
    for (std::size_t len = 1; len < n; len <<= 1) {
        for (std::size_t block = 0; block < n; block += len << 1) {
            for (std::size_t j = block; j < block + len; ++j) {
                double a = v[j];
                double b = v[j + len];
                v[j] = a + b;
                v[j + len] = a - b;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        v[i] *= scale;
    }
}

// FFTW r2c plans, cached per length. The planner is not thread safe; plan
// execution on distinct buffers is.
class RfftPlans {
public:
    static RfftPlans& instance() {
        static RfftPlans plans;
        return plans;
    }

    // out has n/2 + 1 complex entries, unnormalized FFTW convention
    // (sum_j v_j exp(-2 pi i k j / n)).
    void halfspectrum(const double* in, std::size_t n, std::complex<double>* out) {
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = plans_.find(n);
            if (it == plans_.end()) {
                double* tmp_in = fftw_alloc_real(n);
                fftw_complex* tmp_out = fftw_alloc_complex(n / 2 + 1);
                plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), tmp_in, tmp_out,
                                            FFTW_ESTIMATE);
                fftw_free(tmp_in);
                fftw_free(tmp_out);
                plans_.emplace(n, plan);
            } else {
                plan = it->second;
            }
        }
        // new-array execution needs fftw_malloc alignment
        double* buf_in = fftw_alloc_real(n);
        fftw_complex* buf_out = fftw_alloc_complex(n / 2 + 1);
        std::copy(in, in + n, buf_in);
        fftw_execute_dft_r2c(plan, buf_in, buf_out);
        for (std::size_t k = 0; k <= n / 2; ++k) {
            out[k] = std::complex<double>(buf_out[k][0], buf_out[k][1]);
        }
        fftw_free(buf_in);
        fftw_free(buf_out);
    }

private:
    std::mutex mutex_;
    std::map<std::size_t, fftw_plan> plans_;
};

} // namespace

void fwht_normalized_inplace(Vector& v) {
    const std::size_t n = static_cast<std::size_t>(v.size());
    if (!is_pow2(n)) {
        throw NotPowerOfTwo(n);
    }
    fwht_span(v.data(), n);
}

Vector fwht_normalized(const Vector& v) {
    Vector out = v;
    fwht_normalized_inplace(out);
    return out;
}

void fwht_normalized_columns_inplace(Matrix& a) {
    const std::size_t n = static_cast<std::size_t>(a.rows());
    if (!is_pow2(n)) {
        throw NotPowerOfTwo(n);
    }
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        fwht_span(a.col(c).data(), n);
    }
}

Vector real_dft(const Vector& v) {
    const std::size_t n = static_cast<std::size_t>(v.size());
    if (n == 0) {
        throw InvalidArgument("real_dft: empty input");
    }
    if (!v.allFinite()) {
        throw InvalidArgument("real_dft: non-finite input");
    }
    std::vector<std::complex<double>> half(n / 2 + 1);
    RfftPlans::instance().halfspectrum(v.data(), n, half.data());
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Vector out(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k <= n / 2; ++k) {
        out(static_cast<Eigen::Index>(k)) = scale * half[k].real();
    }
    // real input: Re F_{n-k} = Re F_k
    for (std::size_t k = n / 2 + 1; k < n; ++k) {
        out(static_cast<Eigen::Index>(k)) = out(static_cast<Eigen::Index>(n - k));
    }
    return out;
}

namespace {

void real_fourier_span(const double* in, std::size_t n, double* out,
                       std::vector<std::complex<double>>& half) {
    half.resize(n / 2 + 1);
    RfftPlans::instance().halfspectrum(in, n, half.data());
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const double sqrt2_inv_sqrt_n = std::sqrt(2.0) * inv_sqrt_n;
    out[0] = inv_sqrt_n * half[0].real();
    const std::size_t cos_rows = (n + 1) / 2; // k = 1 .. ceil(n/2)-1
    for (std::size_t k = 1; k < cos_rows; ++k) {
        out[k] = sqrt2_inv_sqrt_n * half[k].real();
        out[n - k] = -sqrt2_inv_sqrt_n * half[k].imag();
    }
    if (n % 2 == 0 && n >= 2) {
        out[n / 2] = inv_sqrt_n * half[n / 2].real();
    }
}

} // namespace

void real_fourier_orthonormal_columns_inplace(Matrix& a) {
    const std::size_t n = static_cast<std::size_t>(a.rows());
    if (n == 0) {
        throw InvalidArgument("real_fourier_orthonormal: empty input");
    }
    std::vector<std::complex<double>> half;
    std::vector<double> tmp(n);
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        real_fourier_span(a.col(c).data(), n, tmp.data(), half);
        std::copy(tmp.begin(), tmp.end(), a.col(c).data());
    }
}

Vector real_fourier_orthonormal(const Vector& v) {
    Matrix a = v;
    real_fourier_orthonormal_columns_inplace(a);
    return a.col(0);
}

} // namespace sketchls
