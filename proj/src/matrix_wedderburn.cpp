#include "tenkrylov/matrix_wedderburn.hpp"

#include "tenkrylov/rng.hpp"

#include <cmath>

namespace tenkrylov {

const char* to_string(Termination t) {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::breakdown: return "breakdown";
        default: return "max_rank";
    }
}

Matrix wedderburn_update(const Matrix& a, const Vector& x, const Vector& y) {
    if (x.size() != a.rows() || y.size() != a.cols())
        throw std::invalid_argument("wedderburn_update: pivot length mismatch");
    const Vector ay = a * y;
    const double omega = x.dot(ay);
    const double scale = a.norm() * x.norm() * y.norm();
    if (std::abs(omega) < 1e-14 * scale)
        throw std::invalid_argument("wedderburn_update: singular pivot (x^T A y ~ 0)");
    const Vector xa = a.transpose() * x;
    return a - ay * xa.transpose() / omega;
}

Vector optimal_pivot(const MatvecSource& a, const Vector& y) {
    const Vector ay = a.apply(y);
    const double nrm = ay.norm();
    if (nrm == 0.0)
        throw std::invalid_argument("optimal_pivot: degenerate direction (A y = 0)");
    return ay / nrm;
}

LeadingVectorPolicy LeadingVectorPolicy::random() {
    return {[](int, Index n, std::mt19937_64& rng) { return random_unit_vector(n, rng); }};
}

namespace {

// Two classical Gram-Schmidt sweeps against the first k columns.
Vector orthogonalize(const Matrix& basis, Index k, Vector x) {
    for (int sweep = 0; sweep < 2 && k > 0; ++sweep) {
        const Vector c = basis.leftCols(k).transpose() * x;
        x -= basis.leftCols(k) * c;
    }
    return x;
}

}  // namespace

MatrixWedderburnState wcp_approximate(const MatvecSource& a,
                                      const LeadingVectorPolicy& leading, double tol,
                                      double eps, int r_max, std::uint64_t seed) {
    if (!(tol > 0.0 && tol < 1.0) || !(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("wcp_approximate: tol and eps must lie in (0,1)");
    if (r_max < 1) throw std::invalid_argument("wcp_approximate: r_max must be >= 1");

    const Index m = a.rows(), n = a.cols();
    auto rng = make_rng(seed);
    MatrixWedderburnState st;
    st.X.resize(m, r_max);
    st.B.resize(n, r_max);
    st.Y.resize(n, r_max);
    double nrm2 = 0.0;
    int k = 0;
    while (true) {
        Vector y = leading.next(k + 1, n, rng);
        Vector x = a.apply(y);
        Vector xp = orthogonalize(st.X, k, x);
        if (x.norm() == 0.0 || xp.norm() < tol * x.norm()) {
            // one retry with a fresh random leading vector, then terminate
            y = random_unit_vector(n, rng);
            x = a.apply(y);
            xp = orthogonalize(st.X, k, x);
            if (x.norm() == 0.0 || xp.norm() < tol * x.norm()) {
                st.terminated = Termination::breakdown;
                break;
            }
        }
        const double omega = xp.norm();
        const Vector xk = xp / omega;
        const Vector bk = a.apply_transpose(xk);
        st.X.col(k) = xk;
        st.B.col(k) = bk;
        st.Y.col(k) = y;
        st.omegas.push_back(omega);
        st.err = bk.norm();
        nrm2 += st.err * st.err;
        st.nrm = std::sqrt(nrm2);
        ++k;
        if (st.err <= eps * st.nrm) {
            // the triggering column contributes below the tolerance: drop it
            st.terminated = Termination::converged;
            --k;
            st.omegas.pop_back();
            nrm2 -= st.err * st.err;
            st.nrm = std::sqrt(std::max(nrm2, 0.0));
            break;
        }
        if (k == r_max) {
            st.terminated = Termination::max_rank;
            break;
        }
    }
    st.steps = k;
    st.X.conservativeResize(m, k);
    st.B.conservativeResize(n, k);
    st.Y.conservativeResize(n, k);
    return st;
}

LanczosResult lanczos_bidiag(const MatvecSource& a, const Vector& x0, int steps) {
    if (steps < 1) throw std::invalid_argument("lanczos_bidiag: steps must be >= 1");
    if (std::abs(x0.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("lanczos_bidiag: x0 must be a unit vector");

    const Index m = a.rows(), n = a.cols();
    LanczosResult res;
    res.X.resize(m, steps);
    res.Y.resize(n, steps);

    Vector y = a.apply_transpose(x0);
    const double alpha1 = y.norm();
    double scale = alpha1;
    if (alpha1 < 1e-300) {
        res.breakdown = true;
        res.X.resize(m, 0);
        res.Y.resize(n, 0);
        return res;
    }
    res.alphas.push_back(alpha1);
    res.Y.col(0) = y / alpha1;

    int k = 0;
    while (k < steps) {
        // x-recurrence: x = A y_k - alpha_k x_{k-1}; the seed x0 is not deflated.
        Vector x = a.apply(res.Y.col(k));
        if (k > 0) x -= res.alphas[static_cast<size_t>(k)] * res.X.col(k - 1);
        x = orthogonalize(res.X, k, x);
        const double beta = x.norm();
        if (beta < 1e-14 * scale) {
            res.breakdown = true;
            break;
        }
        scale = std::max(scale, beta);
        res.betas.push_back(beta);
        res.X.col(k) = x / beta;
        ++k;
        if (k == steps) break;

        // y-recurrence: y = A^T x_k - beta_k y_k
        Vector yn = a.apply_transpose(res.X.col(k - 1)) - beta * res.Y.col(k - 1);
        yn = orthogonalize(res.Y, k, yn);
        const double alpha = yn.norm();
        if (alpha < 1e-14 * scale) {
            res.breakdown = true;
            break;
        }
        scale = std::max(scale, alpha);
        res.alphas.push_back(alpha);
        res.Y.col(k) = yn / alpha;
    }
    res.steps = k;
    res.X.conservativeResize(m, k);
    res.Y.conservativeResize(n, k);
    return res;
}

MatrixWedderburnState wcp_lanczos(const MatvecSource& a, const Vector& y1, double tol,
                                  double eps, int r_max) {
    if (std::abs(y1.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("wcp_lanczos: y1 must be a unit vector");
    if (r_max < 1) throw std::invalid_argument("wcp_lanczos: r_max must be >= 1");

    const Index m = a.rows(), n = a.cols();
    MatrixWedderburnState st;
    st.X.resize(m, r_max);
    st.B.resize(n, r_max);
    st.Y.resize(n, r_max);
    double nrm2 = 0.0;
    Vector y = y1;
    int k = 0;
    while (true) {
        Vector x = a.apply(y);
        // short two-term recurrence, then one full safeguard sweep
        Vector xp = x;
        if (k >= 1) xp -= st.X.col(k - 1) * st.X.col(k - 1).dot(xp);
        if (k >= 2) xp -= st.X.col(k - 2) * st.X.col(k - 2).dot(xp);
        if (k > 0) {
            const Vector c = st.X.leftCols(k).transpose() * xp;
            xp -= st.X.leftCols(k) * c;
        }
        if (x.norm() == 0.0 || xp.norm() < tol * x.norm()) {
            st.terminated = Termination::breakdown;
            break;
        }
        const double omega = xp.norm();
        const Vector xk = xp / omega;
        const Vector bk = a.apply_transpose(xk);
        st.X.col(k) = xk;
        st.B.col(k) = bk;
        st.Y.col(k) = y;
        st.omegas.push_back(omega);
        st.err = bk.norm();
        nrm2 += st.err * st.err;
        st.nrm = std::sqrt(nrm2);
        ++k;
        if (st.err <= eps * st.nrm) {
            st.terminated = Termination::converged;
            --k;
            st.omegas.pop_back();
            nrm2 -= st.err * st.err;
            st.nrm = std::sqrt(std::max(nrm2, 0.0));
            break;
        }
        if (k == r_max) {
            st.terminated = Termination::max_rank;
            break;
        }
        y = bk / st.err;
    }
    st.steps = k;
    st.X.conservativeResize(m, k);
    st.B.conservativeResize(n, k);
    st.Y.conservativeResize(n, k);
    return st;
}

}  // namespace tenkrylov
