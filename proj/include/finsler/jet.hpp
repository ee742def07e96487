#pragma once

// Truncated multivariate Taylor arithmetic (higher-order forward-mode AD).
//
// A Jet<N, D, T> holds the Taylor coefficients of a function of D local
// variables up to total degree N.  Coefficients are stored normalized by
// alpha!, so products are plain truncated convolutions.  The coefficient
// type T may itself be a Jet, which gives nested perturbations: the outer
// jet differentiates in one set of variables, the inner one in another.

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <type_traits>

namespace finsler {

namespace detail {

constexpr int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<int>(r);
}

constexpr double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// Monomials of total degree <= N in D variables, ordered by degree and then
// lexicographically with the first variable leading.  Index 0 is the
// constant term and index 1 + d is the linear monomial of variable d.
template <int N, int D>
struct MonomialTable {
    static constexpr int size = binomial(N + D, D);
    static constexpr int n_products = binomial(N + 2 * D, 2 * D);

    std::array<std::array<int, D>, size> exps{};
    std::array<int, size> degree{};
    std::array<std::array<int, 3>, n_products> products{};
    // lower[d][k]: index of exps[k] - e_d, or -1 when exps[k][d] == 0
    std::array<std::array<int, size>, D> lower{};

    constexpr MonomialTable() {
        int n = 0;
        for (int deg = 0; deg <= N; ++deg) {
            std::array<int, D> a{};
            a[0] = deg;
            // Enumerate compositions of deg in lexicographically decreasing order.
            while (true) {
                exps[n] = a;
                degree[n] = deg;
                ++n;
                // next composition: find rightmost non-last position with a value
                int i = D - 2;
                while (i >= 0 && a[i] == 0) --i;
                if (i < 0) break;
                a[i] -= 1;
                int tail = 0;
                for (int j = i + 1; j < D; ++j) {
                    tail += a[j];
                    a[j] = 0;
                }
                a[i + 1] = tail + 1;
            }
        }
        int p = 0;
        for (int i = 0; i < size; ++i) {
            for (int j = 0; j < size; ++j) {
                if (degree[i] + degree[j] > N) continue;
                std::array<int, D> s{};
                for (int d = 0; d < D; ++d) s[d] = exps[i][d] + exps[j][d];
                products[p++] = {i, j, index_of(s)};
            }
        }
        for (int d = 0; d < D; ++d) {
            for (int k = 0; k < size; ++k) {
                if (exps[k][d] == 0) {
                    lower[d][k] = -1;
                } else {
                    std::array<int, D> s = exps[k];
                    s[d] -= 1;
                    lower[d][k] = index_of(s);
                }
            }
        }
    }

    constexpr int index_of(const std::array<int, D>& a) const {
        for (int k = 0; k < size; ++k) {
            bool same = true;
            for (int d = 0; d < D; ++d) same = same && exps[k][d] == a[d];
            if (same) return k;
        }
        return -1;
    }
};

}  // namespace detail

template <int N, int D, class T = double>
class Jet;

template <class T>
struct is_jet : std::false_type {};
template <int N, int D, class T>
struct is_jet<Jet<N, D, T>> : std::true_type {};
template <class T>
inline constexpr bool is_jet_v = is_jet<T>::value;

template <int N, int D, class T>
class Jet {
    static_assert(N >= 0 && D >= 1);

public:
    using scalar_type = T;
    using table_type = detail::MonomialTable<N, D>;
    static constexpr table_type table{};
    static constexpr int order = N;
    static constexpr int dims = D;
    static constexpr int size = table_type::size;

    Jet() { c_.fill(T(0.0)); }
    Jet(const T& v) {  // NOLINT(google-explicit-constructor)
        c_.fill(T(0.0));
        c_[0] = v;
    }
    template <std::floating_point U>
        requires(!std::same_as<T, U>)
    Jet(U v) : Jet(T(v)) {}  // NOLINT(google-explicit-constructor)

    // Local variable z_d expanded around `value`.
    static Jet variable(int d, const T& value) {
        Jet r(value);
        r.c_[1 + d] = T(1.0);
        return r;
    }

    const T& value() const { return c_[0]; }
    const T& coef(int k) const { return c_[k]; }
    T& coef(int k) { return c_[k]; }
    const std::array<T, size>& coefs() const { return c_; }

    // Taylor coefficient of the monomial z^alpha.
    T taylor(const std::array<int, D>& alpha) const {
        int k = table.index_of(alpha);
        return k < 0 ? T(0.0) : c_[k];
    }

    // Partial derivative d^alpha / dz^alpha at the expansion point.
    T derivative(const std::array<int, D>& alpha) const {
        double f = 1.0;
        for (int a : alpha) f *= detail::factorial(a);
        return taylor(alpha) * f;
    }

    // d/dz_d as a jet; the top-degree coefficients of the result are zero
    // and carry no information.
    Jet partial(int d) const {
        Jet r;
        for (int k = 0; k < size; ++k) {
            int lo = table.lower[d][k];
            if (lo >= 0) r.c_[lo] += c_[k] * static_cast<double>(table.exps[k][d]);
        }
        return r;
    }

    // The jet without its constant term.
    Jet nilpotent() const {
        Jet r = *this;
        r.c_[0] = T(0.0);
        return r;
    }

    Jet& operator+=(const Jet& o) {
        for (int k = 0; k < size; ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int k = 0; k < size; ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet& operator*=(const Jet& o) {
        *this = *this * o;
        return *this;
    }
    Jet& operator/=(const Jet& o) {
        *this = *this / o;
        return *this;
    }
    Jet& operator+=(const T& v) {
        c_[0] += v;
        return *this;
    }
    Jet& operator-=(const T& v) {
        c_[0] -= v;
        return *this;
    }
    Jet& operator*=(const T& v) {
        for (auto& x : c_) x *= v;
        return *this;
    }
    Jet& operator/=(const T& v) {
        for (auto& x : c_) x /= v;
        return *this;
    }

    Jet operator-() const {
        Jet r;
        for (int k = 0; k < size; ++k) r.c_[k] = -c_[k];
        return r;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (const auto& p : table.products) r.c_[p[2]] += a.c_[p[0]] * b.c_[p[1]];
        return r;
    }

    template <class U>
        requires(std::same_as<U, T> || std::is_arithmetic_v<U>)
    friend Jet operator+(Jet a, const U& b) {
        a.c_[0] += b;
        return a;
    }
    template <class U>
        requires(std::same_as<U, T> || std::is_arithmetic_v<U>)
    friend Jet operator+(const U& b, Jet a) {
        a.c_[0] += b;
        return a;
    }
    template <class U>
        requires(std::same_as<U, T> || std::is_arithmetic_v<U>)
    friend Jet operator-(Jet a, const U& b) {
        a.c_[0] -= b;
        return a;
    }
    template <class U>
        requires(std::same_as<U, T> || std::is_arithmetic_v<U>)
    friend Jet operator-(const U& b, const Jet& a) {
        Jet r = -a;
        r.c_[0] += b;
        return r;
    }
    template <class U>
        requires(std::same_as<U, T> || std::is_arithmetic_v<U>)
    friend Jet operator*(Jet a, const U& b) {
        for (auto& x : a.c_) x *= b;
        return a;
    }
    template <class U>
        requires(std::same_as<U, T> || std::is_arithmetic_v<U>)
    friend Jet operator*(const U& b, Jet a) {
        for (auto& x : a.c_) x *= b;
        return a;
    }
    template <class U>
        requires(std::same_as<U, T> || std::is_arithmetic_v<U>)
    friend Jet operator/(Jet a, const U& b) {
        for (auto& x : a.c_) x /= b;
        return a;
    }
    template <class U>
        requires(std::same_as<U, T> || std::is_arithmetic_v<U>)
    friend Jet operator/(const U& b, const Jet& a) {
        return reciprocal(a) * b;
    }
    friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

private:
    std::array<T, size> c_;
};

// Innermost double of a possibly nested jet.
inline double primal(double v) { return v; }
template <int N, int D, class T>
double primal(const Jet<N, D, T>& j) {
    return primal(j.value());
}

namespace detail {

// f(a + h) = sum_k taylor[k] h^k with h the nilpotent part of `a`.
template <int N, int D, class T>
Jet<N, D, T> compose(const Jet<N, D, T>& a, const std::array<T, N + 1>& taylor) {
    const Jet<N, D, T> h = a.nilpotent();
    Jet<N, D, T> r(taylor[N]);
    for (int k = N - 1; k >= 0; --k) {
        r = r * h;
        r += taylor[k];
    }
    return r;
}

}  // namespace detail

template <int N, int D, class T>
Jet<N, D, T> reciprocal(const Jet<N, D, T>& a) {
    const T a0 = a.value();
    std::array<T, N + 1> t;
    const T inv = T(1.0) / a0;
    T p = inv;
    for (int k = 0; k <= N; ++k) {
        t[k] = (k % 2 == 0) ? p : -p;
        p = p * inv;
    }
    return detail::compose(a, t);
}

template <int N, int D, class T>
Jet<N, D, T> sqrt(const Jet<N, D, T>& a) {
    using std::sqrt;
    const T a0 = a.value();
    const T r = sqrt(a0);
    const T inv = T(1.0) / a0;
    std::array<T, N + 1> t;
    double binom = 1.0;  // binomial(1/2, k)
    T p = r;
    for (int k = 0; k <= N; ++k) {
        t[k] = p * binom;
        binom *= (0.5 - k) / (k + 1);
        p = p * inv;
    }
    return detail::compose(a, t);
}

template <int N, int D, class T>
Jet<N, D, T> pow(const Jet<N, D, T>& a, double e) {
    using std::pow;
    const T a0 = a.value();
    const T inv = T(1.0) / a0;
    std::array<T, N + 1> t;
    double binom = 1.0;
    T p = pow(a0, e);
    for (int k = 0; k <= N; ++k) {
        t[k] = p * binom;
        binom *= (e - k) / (k + 1);
        p = p * inv;
    }
    return detail::compose(a, t);
}

template <int N, int D, class T>
Jet<N, D, T> exp(const Jet<N, D, T>& a) {
    using std::exp;
    const T e = exp(a.value());
    std::array<T, N + 1> t;
    for (int k = 0; k <= N; ++k) t[k] = e * (1.0 / detail::factorial(k));
    return detail::compose(a, t);
}

template <int N, int D, class T>
Jet<N, D, T> log(const Jet<N, D, T>& a) {
    using std::log;
    const T a0 = a.value();
    const T inv = T(1.0) / a0;
    std::array<T, N + 1> t;
    t[0] = log(a0);
    T p = inv;
    for (int k = 1; k <= N; ++k) {
        t[k] = p * (((k % 2 == 1) ? 1.0 : -1.0) / k);
        p = p * inv;
    }
    return detail::compose(a, t);
}

template <int N, int D, class T>
Jet<N, D, T> sin(const Jet<N, D, T>& a) {
    using std::cos;
    using std::sin;
    const T s = sin(a.value());
    const T c = cos(a.value());
    std::array<T, N + 1> t;
    for (int k = 0; k <= N; ++k) {
        const double f = 1.0 / detail::factorial(k);
        switch (k % 4) {
            case 0: t[k] = s * f; break;
            case 1: t[k] = c * f; break;
            case 2: t[k] = s * (-f); break;
            default: t[k] = c * (-f); break;
        }
    }
    return detail::compose(a, t);
}

template <int N, int D, class T>
Jet<N, D, T> cos(const Jet<N, D, T>& a) {
    using std::cos;
    using std::sin;
    const T s = sin(a.value());
    const T c = cos(a.value());
    std::array<T, N + 1> t;
    for (int k = 0; k <= N; ++k) {
        const double f = 1.0 / detail::factorial(k);
        switch (k % 4) {
            case 0: t[k] = c * f; break;
            case 1: t[k] = s * (-f); break;
            case 2: t[k] = c * (-f); break;
            default: t[k] = s * f; break;
        }
    }
    return detail::compose(a, t);
}

namespace detail {

// atan(q) for q with zero constant term: q - q^3/3 + q^5/5 - ...
template <int N, int D, class T>
Jet<N, D, T> atan_nilpotent(const Jet<N, D, T>& q) {
    Jet<N, D, T> r;
    Jet<N, D, T> p = q;
    const Jet<N, D, T> q2 = q * q;
    for (int k = 0; 2 * k + 1 <= N; ++k) {
        r += p * (((k % 2 == 0) ? 1.0 : -1.0) / (2 * k + 1));
        p = p * q2;
    }
    return r;
}

}  // namespace detail

template <int N, int D, class T>
Jet<N, D, T> atan(const Jet<N, D, T>& a) {
    using std::atan;
    const T a0 = a.value();
    // atan(a) = atan(a0) + atan((a - a0) / (1 + a0 a))
    Jet<N, D, T> q = a.nilpotent() / (a * a0 + 1.0);
    Jet<N, D, T> r = detail::atan_nilpotent(q);
    r += atan(a0);
    return r;
}

template <int N, int D, class T>
Jet<N, D, T> atan2(const Jet<N, D, T>& y, const Jet<N, D, T>& x) {
    using std::atan2;
    const T x0 = x.value();
    const T y0 = y.value();
    // Rotate (x, y) by -angle0; the residual angle has zero constant term.
    Jet<N, D, T> q = (y * x0 - x * y0) / (x * x0 + y * y0);
    q.coef(0) = T(0.0);
    Jet<N, D, T> r = detail::atan_nilpotent(q);
    r += atan2(y0, x0);
    return r;
}

template <class S>
S ipow(const S& a, int n) {
    if (n == 0) return S(1.0);
    if (n < 0) return S(1.0) / ipow(a, -n);
    S r = a;
    for (int i = 1; i < n; ++i) r = r * a;
    return r;
}

}  // namespace finsler
