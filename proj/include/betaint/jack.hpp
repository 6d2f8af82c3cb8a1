#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "betaint/errors.hpp"
#include "betaint/specfun.hpp"

namespace betaint {

// Evaluation tables for the Jack polynomials C_kappa^beta in the
// normalization fixed by the trace identity sum_{|kappa|=k} C_kappa(X) =
// (tr X)^k, with Jack parameter alpha = 2/beta.
//
// Construction: the monic Jack polynomials P_kappa = m_kappa + sum u m_lambda
// are eigenfunctions of D = (alpha/2) sum x_i^2 d_i^2 +
// sum_{i != j} x_i^2/(x_i - x_j) d_i, which acts lower-triangularly on the
// monomial basis in dominance order. Matching coefficients gives
//
//   u_{kappa,lambda} (e_kappa - e_lambda)
//     = sum_{moves} N_{cd}(lambda) (a - b) u_{kappa,mu},
//
// where a move picks two positive parts c >= d of lambda, spreads them to
// a = c + s, b = d - s >= 0 (s >= 1), mu = sort(lambda - {c,d} + {a,b}),
// N_{cd} counts the position pairs carrying values (c, d), and
// e_lambda = (alpha/2) sum l_i(l_i - 1) - sum (i-1) l_i  (the n-free part).
// The C normalization is C_kappa = alpha^k k! / c'_kappa(alpha) * P_kappa
// with c'_kappa(alpha) = prod_boxes (alpha (arm+1) + leg).
class JackTable {
public:
    JackTable(int p, int beta, int max_degree, std::size_t coeff_budget = kDefaultBudget)
        : p_(p), beta_(beta), max_degree_(max_degree), alpha_(jack_alpha(beta)) {
        if (p < 1) throw DomainError("jack table needs p >= 1");
        if (max_degree < 0) throw DomainError("jack table needs max_degree >= 0");
        std::size_t total = 0;
        degrees_.reserve(max_degree + 1);
        for (int k = 0; k <= max_degree; ++k) {
            degrees_.push_back(build_degree(k, total, coeff_budget));
        }
    }

    int p() const { return p_; }
    int beta() const { return beta_; }
    int max_degree() const { return max_degree_; }

    const std::vector<Partition>& partitions(int k) const {
        check_degree(k);
        return degrees_[k].parts;
    }

    // Trace-identity residual |sum_kappa C_kappa(1_p) - p^k| / p^k, recorded
    // at build time so coefficient drift is visible.
    double trace_residual(int k) const {
        check_degree(k);
        return degrees_[k].residual;
    }

    // C_kappa^beta at the eigenvalue vector x (length p). Partitions with
    // more than p nonzero parts evaluate to zero.
    double eval(const Partition& kappa, const std::vector<double>& x) const {
        const int k = kappa.weight();
        check_degree(k);
        if (static_cast<int>(x.size()) != p_)
            throw DimensionMismatch("eigenvalue vector length must equal table dimension");
        if (kappa.length() > p_) return 0.0;
        const Degree& d = degrees_[k];
        auto it = d.index.find(kappa.parts());
        if (it == d.index.end()) throw Error("partition missing from jack table");
        std::vector<double> m = monomial_values(k, x);
        double acc = 0;
        for (const auto& [idx, coef] : d.coeffs[it->second]) acc += coef * m[idx];
        return acc;
    }

    // All C_kappa of one degree at x, in the table's partition order.
    std::vector<double> eval_degree(int k, const std::vector<double>& x) const {
        check_degree(k);
        if (static_cast<int>(x.size()) != p_)
            throw DimensionMismatch("eigenvalue vector length must equal table dimension");
        const Degree& d = degrees_[k];
        std::vector<double> m = monomial_values(k, x);
        std::vector<double> out(d.parts.size(), 0.0);
        for (size_t i = 0; i < d.parts.size(); ++i)
            for (const auto& [idx, coef] : d.coeffs[i]) out[i] += coef * m[idx];
        return out;
    }

    void dump(std::ostream& os) const {
        os << "betaint-jack-table v1\n";
        os << p_ << " " << beta_ << " " << max_degree_ << "\n";
        os.precision(17);
        for (int k = 0; k <= max_degree_; ++k) {
            const Degree& d = degrees_[k];
            os << "degree " << k << " " << d.parts.size() << "\n";
            for (size_t i = 0; i < d.parts.size(); ++i) {
                os << d.parts[i].length();
                for (int part : d.parts[i].parts()) os << " " << part;
                os << " : " << d.coeffs[i].size();
                for (const auto& [idx, coef] : d.coeffs[i]) os << " " << idx << " " << coef;
                os << "\n";
            }
        }
    }

    static JackTable load(std::istream& is) {
        std::string header;
        std::getline(is, header);
        if (header != "betaint-jack-table v1")
            throw DomainError("unrecognized jack table file header: " + header);
        int p, beta, K;
        if (!(is >> p >> beta >> K)) throw DomainError("truncated jack table file");
        JackTable t(p, beta, 0);
        t.max_degree_ = K;
        t.degrees_.clear();
        for (int k = 0; k <= K; ++k) {
            std::string word;
            int deg = 0;
            size_t count = 0;
            if (!(is >> word >> deg >> count) || word != "degree" || deg != k)
                throw DomainError("malformed jack table file");
            Degree d;
            for (size_t i = 0; i < count; ++i) {
                int len;
                is >> len;
                std::vector<int> parts(len);
                for (int& v : parts) is >> v;
                std::string colon;
                size_t ncoef;
                is >> colon >> ncoef;
                std::vector<std::pair<int, double>> coefs(ncoef);
                for (auto& [idx, coef] : coefs) is >> idx >> coef;
                d.index[parts] = static_cast<int>(d.parts.size());
                d.parts.emplace_back(std::move(parts));
                d.coeffs.push_back(std::move(coefs));
            }
            if (!is) throw DomainError("truncated jack table file");
            t.degrees_.push_back(std::move(d));
        }
        return t;
    }

    static constexpr std::size_t kDefaultBudget = std::size_t(1) << 24;

private:
    struct Degree {
        std::vector<Partition> parts;            // reverse-lex, len <= p
        std::map<std::vector<int>, int> index;
        std::vector<std::vector<std::pair<int, double>>> coeffs;  // C in monomial basis
        double residual = 0.0;
    };

    void check_degree(int k) const {
        if (k < 0 || k > max_degree_)
            throw DegreeExceeded("degree " + std::to_string(k) + " exceeds table limit " +
                                 std::to_string(max_degree_));
    }

    double eig(const Partition& l) const {
        double e = 0;
        for (int i = 0; i < l.length(); ++i) {
            double li = l.part(i);
            e += 0.5 * alpha_ * li * (li - 1.0) - i * li;
        }
        return e;
    }

    static double log_factorial(int k) { return std::lgamma(k + 1.0); }

    // c'_kappa(alpha) = prod over boxes (i,j) of (alpha (arm+1) + leg).
    double c_prime(const Partition& kappa) const {
        std::vector<int> conj;
        for (int j = 1; j <= kappa.part(0); ++j) {
            int c = 0;
            for (int i = 0; i < kappa.length(); ++i)
                if (kappa.part(i) >= j) ++c;
            conj.push_back(c);
        }
        double prod = 1;
        for (int i = 0; i < kappa.length(); ++i)
            for (int j = 0; j < kappa.part(i); ++j) {
                int arm = kappa.part(i) - (j + 1);
                int leg = conj[j] - (i + 1);
                prod *= alpha_ * (arm + 1) + leg;
            }
        return prod;
    }

    Degree build_degree(int k, std::size_t& total, std::size_t budget) {
        Degree d;
        d.parts = partitions_of(k, p_);
        for (size_t i = 0; i < d.parts.size(); ++i) d.index[d.parts[i].parts()] = static_cast<int>(i);
        const size_t n = d.parts.size();
        d.coeffs.resize(n);

        // Reverse-lex enumeration is a linear extension of dominance, so for
        // each kappa the needed u_{kappa,mu} (mu > lambda) are already done
        // when lambda is reached.
        for (size_t ki = 0; ki < n; ++ki) {
            const Partition& kappa = d.parts[ki];
            std::vector<double> u(n, 0.0);
            u[ki] = 1.0;
            const double e_kappa = eig(kappa);
            for (size_t li = ki + 1; li < n; ++li) {
                const Partition& lambda = d.parts[li];
                if (!kappa.dominates(lambda)) continue;
                double acc = 0;
                accumulate_moves(lambda, kappa, d, u, acc);
                double denom = e_kappa - eig(lambda);
                u[li] = acc / denom;
            }
            // Scale to the C normalization.
            double log_scale = k * std::log(alpha_) + log_factorial(k) - std::log(c_prime(kappa));
            double scale = std::exp(log_scale);
            std::vector<std::pair<int, double>> row;
            for (size_t li = ki; li < n; ++li)
                if (u[li] != 0.0) row.emplace_back(static_cast<int>(li), scale * u[li]);
            total += row.size();
            if (total > budget)
                throw BudgetExceeded("jack table coefficient budget exceeded at degree " +
                                     std::to_string(k));
            d.coeffs[ki] = std::move(row);
        }

        // Trace-identity residual at the all-ones vector.
        std::vector<double> ones(p_, 1.0);
        double s = 0;
        {
            std::vector<double> m = monomial_values_for(d, k, ones);
            for (size_t i = 0; i < n; ++i)
                for (const auto& [idx, coef] : d.coeffs[i]) s += coef * m[idx];
        }
        double target = std::pow(static_cast<double>(p_), k);
        d.residual = (k == 0) ? std::fabs(s - 1.0) : std::fabs(s - target) / target;
        return d;
    }

    void accumulate_moves(const Partition& lambda, const Partition& kappa, const Degree& d,
                          const std::vector<double>& u, double& acc) const {
        const auto& lp = lambda.parts();
        // Multiplicity of each distinct value.
        std::vector<std::pair<int, int>> mult;  // (value, count)
        for (int v : lp) {
            if (!mult.empty() && mult.back().first == v) ++mult.back().second;
            else mult.emplace_back(v, 1);
        }
        for (size_t ci = 0; ci < mult.size(); ++ci) {
            for (size_t di = ci; di < mult.size(); ++di) {
                int c = mult[ci].first, dval = mult[di].first;
                double npairs = (ci == di)
                                    ? 0.5 * mult[ci].second * (mult[ci].second - 1)
                                    : static_cast<double>(mult[ci].second) * mult[di].second;
                if (npairs == 0) continue;
                for (int s = 1; s <= dval; ++s) {
                    int a = c + s, b = dval - s;
                    std::vector<int> mu = lp;
                    // Remove one copy of c and one of d, add a and b.
                    remove_one(mu, c);
                    remove_one(mu, dval);
                    mu.push_back(a);
                    if (b > 0) mu.push_back(b);
                    std::sort(mu.begin(), mu.end(), std::greater<int>());
                    auto it = d.index.find(mu);
                    if (it == d.index.end()) continue;  // > p parts cannot occur here
                    Partition mu_part(mu);
                    if (!kappa.dominates(mu_part)) continue;
                    acc += npairs * (a - b) * u[it->second];
                }
            }
        }
    }

    static void remove_one(std::vector<int>& v, int value) {
        auto it = std::find(v.begin(), v.end(), value);
        v.erase(it);
    }

    // Monomial symmetric polynomials m_lambda(x) for all lambda of degree k.
    std::vector<double> monomial_values(int k, const std::vector<double>& x) const {
        return monomial_values_for(degrees_[k], k, x);
    }

    std::vector<double> monomial_values_for(const Degree& d, int /*k*/,
                                            const std::vector<double>& x) const {
        std::vector<double> out(d.parts.size(), 0.0);
        for (size_t i = 0; i < d.parts.size(); ++i) {
            std::vector<int> expo(p_, 0);
            for (int j = 0; j < d.parts[i].length(); ++j) expo[j] = d.parts[i].part(j);
            std::sort(expo.begin(), expo.end());
            double s = 0;
            do {
                double term = 1;
                for (int j = 0; j < p_; ++j) {
                    if (expo[j] == 0) continue;
                    term *= std::pow(x[j], expo[j]);
                }
                s += term;
            } while (std::next_permutation(expo.begin(), expo.end()));
            out[i] = s;
        }
        return out;
    }

    int p_, beta_, max_degree_;
    double alpha_;
    std::vector<Degree> degrees_;
};

// Process-wide cache. A request for (p, beta, K) is served by any cached
// table with the same (p, beta) and max_degree >= K; construction happens
// under the lock, lookups are safe from any thread.
inline std::shared_ptr<const JackTable> jack_table_cached(int p, int beta, int max_degree) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const JackTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p, beta);
    auto it = cache.find(key);
    if (it != cache.end() && it->second->max_degree() >= max_degree) return it->second;
    auto table = std::make_shared<const JackTable>(p, beta, max_degree);
    cache[key] = table;
    return table;
}

}  // namespace betaint
