#include "aclab/rtn.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "aclab/closed_forms.hpp"
#include "aclab/errors.hpp"

namespace aclab {

ReplicaTensors make_replica_tensors(Ensemble ensemble, int d) {
    const auto basis = enumerate_commutant(ensemble, 2);
    const int nc = static_cast<int>(basis.size());
    const auto gram_d = gram_matrix(basis, d);
    const auto wg = weingarten_matrix(basis, static_cast<long>(d) * d);

    ReplicaTensors tens;
    tens.ensemble = ensemble;
    tens.d = d;
    tens.nc = nc;
    tens.first_layer_weight =
        1.0 / static_cast<double>(gram_row_sum(ensemble, static_cast<long>(d) * d, 2));
    tens.gram_site = gram_d.entries;
    tens.bulk.assign(static_cast<std::size_t>(nc) * nc * nc, 0.0);
    for (int tau = 0; tau < nc; ++tau)
        for (int a1 = 0; a1 < nc; ++a1)
            for (int a2 = 0; a2 < nc; ++a2) {
                double acc = 0.0;
                for (int pi = 0; pi < nc; ++pi)
                    acc += wg.entries(tau, pi) * gram_d.entries(pi, a1) * gram_d.entries(pi, a2);
                tens.bulk[(static_cast<std::size_t>(tau) * nc + a1) * nc + a2] = acc;
            }

    auto find = [&](const PermutationElement& p) {
        if (ensemble == Ensemble::Unitary) {
            for (int i = 0; i < nc; ++i)
                if (basis.permutations[i] == p) return i;
        } else {
            const auto pair = pairing_from_permutation(p);
            for (int i = 0; i < nc; ++i)
                if (basis.pairings[i] == pair) return i;
        }
        throw std::logic_error("replica tensors: boundary element missing from basis");
    };
    const auto id = PermutationElement::identity(2);
    PermutationElement swap;
    swap.mapping = {1, 0};
    tens.id_index = find(id);
    tens.swap_index = find(swap);
    return tens;
}

namespace {

std::vector<Eigen::VectorXd> closure_weights(const ReplicaTensors& tens, int n_sites,
                                             bool purity) {
    std::vector<Eigen::VectorXd> w(n_sites);
    for (int i = 0; i < n_sites; ++i) {
        if (!purity) {
            w[i] = Eigen::VectorXd::Ones(tens.nc);
        } else {
            // Replica trick: swap element closes the kept half, identity the
            // traced half; single-site overlaps are Gram rows at q = d.
            const int elem = (i < n_sites / 2) ? tens.id_index : tens.swap_index;
            w[i] = tens.gram_site.row(elem).transpose();
        }
    }
    return w;
}

struct ExactState {
    int n_sites;
    int nc;
    std::vector<double> v;
    double log_scale = 0.0;

    void renormalize() {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        if (m > 0.0 && (m > 1e8 || m < 1e-8)) {
            const double inv = 1.0 / m;
            for (double& x : v) x *= inv;
            log_scale += std::log(m);
        }
    }
};

ExactState exact_first_layer(const ReplicaTensors& tens, int n_sites) {
    ExactState st;
    st.n_sites = n_sites;
    st.nc = tens.nc;
    std::size_t dim = 1;
    for (int i = 0; i < n_sites; ++i) dim *= tens.nc;
    st.v.assign(dim, 0.0);
    // product over pairs of c0 * delta_{a a}; scale carried in log space
    st.log_scale = (n_sites / 2) * std::log(tens.first_layer_weight);
    const int nc = tens.nc;
    std::size_t pair_dim = 1;
    for (int i = 0; i < n_sites / 2; ++i) pair_dim *= nc;
    std::vector<int> lab(n_sites / 2);
    for (std::size_t p = 0; p < pair_dim; ++p) {
        std::size_t digits = p;
        for (int i = n_sites / 2 - 1; i >= 0; --i) {
            lab[i] = static_cast<int>(digits % nc);
            digits /= nc;
        }
        std::size_t idx = 0;
        for (int i = 0; i < n_sites / 2; ++i) idx = (idx * nc + lab[i]) * nc + lab[i];
        st.v[idx] = 1.0;
    }
    return st;
}

void exact_apply_layer(const ReplicaTensors& tens, ExactState& st, int offset, bool reflect) {
    const int nc = tens.nc;
    const int n = st.n_sites;
    std::vector<int> gates;
    for (int i = offset; i + 1 < n; i += 2) gates.push_back(i);
    if (reflect) std::reverse(gates.begin(), gates.end());
    std::vector<double> in(static_cast<std::size_t>(nc) * nc), out(nc);
    for (int i : gates) {
        std::size_t post = 1;
        for (int s = i + 2; s < n; ++s) post *= nc;
        std::size_t pre = st.v.size() / (post * nc * nc);
        for (std::size_t hi = 0; hi < pre; ++hi) {
            const std::size_t base_hi = hi * nc * nc * post;
            for (std::size_t lo = 0; lo < post; ++lo) {
                const std::size_t base = base_hi + lo;
                for (int a = 0; a < nc * nc; ++a) in[a] = st.v[base + a * post];
                for (int b = 0; b < nc; ++b) {
                    double acc = 0.0;
                    for (int a1 = 0; a1 < nc; ++a1)
                        for (int a2 = 0; a2 < nc; ++a2)
                            acc += tens.w(b, a1, a2) * in[a1 * nc + a2];
                    out[b] = acc;
                }
                for (int b1 = 0; b1 < nc; ++b1)
                    for (int b2 = 0; b2 < nc; ++b2)
                        st.v[base + (b1 * nc + b2) * post] = (b1 == b2) ? out[b1] : 0.0;
            }
        }
    }
    st.renormalize();
}

double exact_close(const ReplicaTensors& tens, const ExactState& st,
                   const std::vector<Eigen::VectorXd>& weights) {
    const int nc = tens.nc;
    std::vector<double> cur = st.v;
    for (int site = st.n_sites - 1; site >= 0; --site) {
        const std::size_t out_dim = cur.size() / nc;
        std::vector<double> next(out_dim, 0.0);
        for (std::size_t j = 0; j < out_dim; ++j) {
            double acc = 0.0;
            for (int a = 0; a < nc; ++a) acc += cur[j * nc + a] * weights[site](a);
            next[j] = acc;
        }
        cur = std::move(next);
    }
    return cur[0] * std::exp(st.log_scale);
}

// Tensor train over replica labels; cores A[site][a] are (chiL x chiR).
struct TrainState {
    int n_sites;
    int nc;
    std::vector<std::vector<Eigen::MatrixXd>> cores;
    double log_scale = 0.0;
    double trunc_sq = 0.0;  // accumulated squared relative truncation weight

    int bond(int i) const { return static_cast<int>(cores[i][0].cols()); }
};

TrainState train_first_layer(const ReplicaTensors& tens, int n_sites) {
    TrainState st;
    st.n_sites = n_sites;
    st.nc = tens.nc;
    st.log_scale = (n_sites / 2) * std::log(tens.first_layer_weight);
    st.cores.resize(n_sites);
    for (int i = 0; i < n_sites; ++i) {
        st.cores[i].resize(tens.nc);
        const bool left_of_pair = (i % 2 == 0);
        for (int a = 0; a < tens.nc; ++a) {
            if (left_of_pair) {
                Eigen::MatrixXd m = Eigen::MatrixXd::Zero(1, tens.nc);
                m(0, a) = 1.0;
                st.cores[i][a] = m;
            } else {
                Eigen::MatrixXd m = Eigen::MatrixXd::Zero(tens.nc, 1);
                m(a, 0) = 1.0;
                st.cores[i][a] = m;
            }
        }
    }
    return st;
}

void train_apply_gate(const ReplicaTensors& tens, TrainState& st, int i, const RtnMethod& method) {
    const int nc = tens.nc;
    const int chi_l = static_cast<int>(st.cores[i][0].rows());
    const int chi_r = static_cast<int>(st.cores[i + 1][0].cols());

    // two-site blocks after the gate: M_b = sum_{a1 a2} W[b,a1,a2] A_i[a1] A_{i+1}[a2]
    std::vector<Eigen::MatrixXd> prod(static_cast<std::size_t>(nc) * nc);
    for (int a1 = 0; a1 < nc; ++a1)
        for (int a2 = 0; a2 < nc; ++a2) prod[a1 * nc + a2] = st.cores[i][a1] * st.cores[i + 1][a2];
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nc) * chi_l,
                                                  static_cast<Eigen::Index>(nc) * chi_r);
    for (int b = 0; b < nc; ++b) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(chi_l, chi_r);
        for (int a1 = 0; a1 < nc; ++a1)
            for (int a2 = 0; a2 < nc; ++a2) m += tens.w(b, a1, a2) * prod[a1 * nc + a2];
        theta.block(static_cast<Eigen::Index>(b) * chi_l, static_cast<Eigen::Index>(b) * chi_r,
                    chi_l, chi_r) = m;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double total_sq = sv.squaredNorm();
    if (!(total_sq > 0.0)) throw numerical_error("rtn: tensor-train state collapsed to zero");
    int keep = 0;
    double kept_sq = 0.0;
    const double cut_sq = method.tt_tol * method.tt_tol * total_sq;
    while (keep < sv.size() && keep < method.tt_max_bond) {
        kept_sq += sv(keep) * sv(keep);
        ++keep;
        if (total_sq - kept_sq <= cut_sq) break;
    }
    st.trunc_sq += std::max(0.0, (total_sq - kept_sq) / total_sq);
    if (st.trunc_sq > 1e-3)
        throw numerical_error("rtn: tensor-train truncation did not converge", st.trunc_sq);

    const double scale = sv(0);
    st.log_scale += std::log(scale);
    Eigen::MatrixXd u = svd.matrixU().leftCols(keep);
    Eigen::MatrixXd v = svd.matrixV().leftCols(keep);
    Eigen::VectorXd s = sv.head(keep) / scale;
    for (int a = 0; a < nc; ++a) {
        st.cores[i][a] = u.middleRows(static_cast<Eigen::Index>(a) * chi_l, chi_l);
        st.cores[i + 1][a] =
            s.asDiagonal() * v.middleRows(static_cast<Eigen::Index>(a) * chi_r, chi_r).transpose();
    }
}

// right-normalize the chain so the next left-to-right gate sweep truncates in
// a proper canonical environment
void train_right_normalize(TrainState& st) {
    const int nc = st.nc;
    for (int i = st.n_sites - 1; i > 0; --i) {
        const int chi_l = static_cast<int>(st.cores[i][0].rows());
        const int chi_r = static_cast<int>(st.cores[i][0].cols());
        Eigen::MatrixXd m(chi_l, nc * chi_r);
        for (int a = 0; a < nc; ++a)
            m.middleCols(static_cast<Eigen::Index>(a) * chi_r, chi_r) = st.cores[i][a];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const int keep = static_cast<int>(svd.singularValues().size());
        Eigen::MatrixXd vt = svd.matrixV().transpose();
        for (int a = 0; a < nc; ++a)
            st.cores[i][a] = vt.middleCols(static_cast<Eigen::Index>(a) * chi_r, chi_r);
        Eigen::MatrixXd carry =
            svd.matrixU().leftCols(keep) * svd.singularValues().head(keep).asDiagonal();
        for (int a = 0; a < nc; ++a) st.cores[i - 1][a] = st.cores[i - 1][a] * carry;
    }
    // keep magnitudes tame
    double m0 = 0.0;
    for (int a = 0; a < nc; ++a) m0 = std::max(m0, st.cores[0][a].cwiseAbs().maxCoeff());
    if (m0 > 0.0 && (m0 > 1e8 || m0 < 1e-8)) {
        for (int a = 0; a < nc; ++a) st.cores[0][a] /= m0;
        st.log_scale += std::log(m0);
    }
}

// QR at `site`, absorbing the triangular factor rightward; moves the
// orthogonality center one site to the right.
void train_shift_center_right(TrainState& st, int site) {
    const int nc = st.nc;
    const int chi_l = static_cast<int>(st.cores[site][0].rows());
    const int chi_r = static_cast<int>(st.cores[site][0].cols());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(nc) * chi_l, chi_r);
    for (int a = 0; a < nc; ++a)
        m.middleRows(static_cast<Eigen::Index>(a) * chi_l, chi_l) = st.cores[site][a];
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const int k = static_cast<int>(std::min<Eigen::Index>(m.rows(), m.cols()));
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), k);
    Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (int a = 0; a < nc; ++a)
        st.cores[site][a] = q.middleRows(static_cast<Eigen::Index>(a) * chi_l, chi_l);
    for (int a = 0; a < nc; ++a) st.cores[site + 1][a] = r * st.cores[site + 1][a];
}

void train_apply_layer(const ReplicaTensors& tens, TrainState& st, int offset,
                       const RtnMethod& method) {
    // mixed-canonical sweep: right-normalize, then walk the center rightward so
    // each gate truncates in an orthonormal environment
    train_right_normalize(st);
    int center = 0;
    for (int i = offset; i + 1 < st.n_sites; i += 2) {
        while (center < i) train_shift_center_right(st, center++);
        train_apply_gate(tens, st, i, method);
        center = i + 1;
    }
}

double train_close(const TrainState& st, const std::vector<Eigen::VectorXd>& weights) {
    Eigen::RowVectorXd u = Eigen::RowVectorXd::Ones(1);
    for (int i = 0; i < st.n_sites; ++i) {
        Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(st.cores[i][0].cols());
        for (int a = 0; a < st.nc; ++a) next += weights[i](a) * (u * st.cores[i][a]);
        u = next;
    }
    return u(0) * std::exp(st.log_scale);
}

bool exact_fits(int n_sites, int nc) {
    double dim = 1.0;
    for (int i = 0; i < n_sites; ++i) {
        dim *= nc;
        if (dim > static_cast<double>(kExactRtnCapacity)) return false;
    }
    return true;
}

}  // namespace

namespace detail {

RtnValue contract_rtn(int n_sites, int t, Ensemble ensemble, const RtnMethod& method, int d,
                      bool purity_closure, bool reflect) {
    if (n_sites < 2 || n_sites % 2 != 0)
        throw std::invalid_argument("rtn: N must be even and >= 2");
    if (t < (purity_closure ? 0 : 1)) throw std::invalid_argument("rtn: depth out of range");
    const auto tens = make_replica_tensors(ensemble, d);
    if (purity_closure && t == 0) return RtnValue{1.0, 0.0, "exact"};

    RtnMode mode = method.mode;
    if (mode == RtnMode::Auto)
        mode = exact_fits(n_sites, tens.nc) ? RtnMode::Exact : RtnMode::TensorTrain;
    if (mode == RtnMode::Exact && !exact_fits(n_sites, tens.nc))
        throw capacity_error("rtn: exact contraction exceeds " +
                             std::to_string(kExactRtnCapacity) +
                             " states; use the tensor_train method");

    const auto weights = closure_weights(tens, n_sites, purity_closure);
    if (mode == RtnMode::Exact) {
        ExactState st = exact_first_layer(tens, n_sites);
        for (int s = 2; s <= t; ++s) exact_apply_layer(tens, st, (s % 2 == 1) ? 0 : 1, reflect);
        return RtnValue{exact_close(tens, st, weights), 0.0, "exact"};
    }
    TrainState st = train_first_layer(tens, n_sites);
    for (int s = 2; s <= t; ++s) train_apply_layer(tens, st, (s % 2 == 1) ? 0 : 1, method);
    return RtnValue{train_close(st, weights), std::sqrt(st.trunc_sq), "tensor_train"};
}

}  // namespace detail

RtnValue contract_annealed_ipr2(int n_sites, int t, Ensemble ensemble, const RtnMethod& method,
                                int d) {
    auto r = detail::contract_rtn(n_sites, t, ensemble, method, d, false, false);
    double dim = 1.0;
    for (int i = 0; i < n_sites; ++i) dim *= d;
    r.value *= dim;
    return r;
}

RtnValue annealed_half_chain_purity(int n_sites, int t, Ensemble ensemble, const RtnMethod& method,
                                    int d) {
    return detail::contract_rtn(n_sites, t, ensemble, method, d, true, false);
}

AnnealedSeries delta_s2_series(const std::vector<int>& n_list, int t_max, Ensemble ensemble,
                               const RtnMethod& method, int d) {
    AnnealedSeries series{ensemble, {}};
    for (int n : n_list) {
        if (n < 2 || n % 2 != 0) throw std::invalid_argument("delta_s2_series: N must be even");
        const auto tens = make_replica_tensors(ensemble, d);
        RtnMode mode = method.mode;
        if (mode == RtnMode::Auto)
            mode = exact_fits(n, tens.nc) ? RtnMode::Exact : RtnMode::TensorTrain;
        const auto ipr_w = closure_weights(tens, n, false);
        const auto pur_w = closure_weights(tens, n, true);
        double dim = 1.0;
        for (int i = 0; i < n; ++i) dim *= d;
        const double log_haar = haar_log_ipr(ensemble, n * std::log(static_cast<double>(d)), 2);

        auto emit = [&](int t, double i2, double purity, double trunc) {
            AnnealedPoint pt;
            pt.n_sites = n;
            pt.t = t;
            pt.annealed_i2 = i2;
            pt.annealed_purity = purity;
            pt.delta_s2 = std::log(i2) - log_haar;
            pt.method = (mode == RtnMode::Exact) ? "exact" : "tensor_train";
            pt.trunc_error = trunc;
            series.points.push_back(pt);
        };

        if (mode == RtnMode::Exact) {
            ExactState st = exact_first_layer(tens, n);
            emit(1, dim * exact_close(tens, st, ipr_w), exact_close(tens, st, pur_w), 0.0);
            for (int s = 2; s <= t_max; ++s) {
                exact_apply_layer(tens, st, (s % 2 == 1) ? 0 : 1, false);
                emit(s, dim * exact_close(tens, st, ipr_w), exact_close(tens, st, pur_w), 0.0);
            }
        } else {
            TrainState st = train_first_layer(tens, n);
            emit(1, dim * train_close(st, ipr_w), train_close(st, pur_w), 0.0);
            for (int s = 2; s <= t_max; ++s) {
                train_apply_layer(tens, st, (s % 2 == 1) ? 0 : 1, method);
                emit(s, dim * train_close(st, ipr_w), train_close(st, pur_w),
                     std::sqrt(st.trunc_sq));
            }
        }
    }
    return series;
}

}  // namespace aclab
