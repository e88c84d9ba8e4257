#pragma once

#include <cassert>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace exiso {

// Dense matrix over an exact field type T. Row-major.
// Conventions follow the row-vector habit used throughout: vectors are rows
// and group elements act on the right, v -> v * M.
template <class T>
class Mat {
  public:
    Mat() : r_(0), c_(0) {}
    Mat(int r, int c, const T& fill = T(0)) : r_(r), c_(c), a_(static_cast<size_t>(r) * c, fill) {}

    static Mat identity(int n, const T& one = T(1)) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = one;
        return m;
    }

    static Mat from_rows(std::initializer_list<std::initializer_list<T>> rows) {
        Mat m(static_cast<int>(rows.size()), static_cast<int>(rows.begin()->size()));
        int i = 0;
        for (auto& row : rows) {
            int j = 0;
            for (auto& x : row) m(i, j++) = x;
            ++i;
        }
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }

    T& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
    const T& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

    bool operator==(const Mat& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }
    bool operator!=(const Mat& o) const { return !(*this == o); }

    Mat operator*(const Mat& o) const {
        assert(c_ == o.r_);
        Mat out(r_, o.c_);
        for (int i = 0; i < r_; ++i)
            for (int k = 0; k < c_; ++k) {
                const T& x = (*this)(i, k);
                if (x == T(0)) continue;
                for (int j = 0; j < o.c_; ++j) out(i, j) += x * o(k, j);
            }
        return out;
    }

    Mat operator+(const Mat& o) const {
        assert(r_ == o.r_ && c_ == o.c_);
        Mat out(r_, c_);
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] + o.a_[i];
        return out;
    }

    Mat operator-(const Mat& o) const {
        assert(r_ == o.r_ && c_ == o.c_);
        Mat out(r_, c_);
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] - o.a_[i];
        return out;
    }

    Mat operator-() const {
        Mat out(r_, c_);
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = -a_[i];
        return out;
    }

    Mat scaled(const T& s) const {
        Mat out(r_, c_);
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] * s;
        return out;
    }

    Mat transpose() const {
        Mat out(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    // Entry-wise map (used for conjugation of matrices over E).
    template <class F>
    Mat map(F f) const {
        Mat out(r_, c_);
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = f(a_[i]);
        return out;
    }

    Mat block(int i0, int j0, int nr, int nc) const {
        Mat out(nr, nc);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j) out(i, j) = (*this)(i0 + i, j0 + j);
        return out;
    }

    void set_block(int i0, int j0, const Mat& b) {
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
    }

    bool is_zero() const {
        for (auto& x : a_) if (!(x == T(0))) return false;
        return true;
    }

    // Gaussian elimination; returns rank. If inv != nullptr and the matrix is
    // square invertible, *inv receives the inverse.
    int rank(Mat* inv = nullptr) const {
        Mat m = *this;
        Mat e = Mat::identity(r_);
        int rk = 0;
        for (int col = 0; col < c_ && rk < r_; ++col) {
            int piv = -1;
            for (int i = rk; i < r_; ++i)
                if (!(m(i, col) == T(0))) { piv = i; break; }
            if (piv < 0) continue;
            m.swap_rows(rk, piv);
            e.swap_rows(rk, piv);
            T d = m(rk, col);
            m.scale_row(rk, T(1) / d);
            e.scale_row(rk, T(1) / d);
            for (int i = 0; i < r_; ++i) {
                if (i == rk) continue;
                T f = m(i, col);
                if (f == T(0)) continue;
                m.add_row(i, rk, -f);
                e.add_row(i, rk, -f);
            }
            ++rk;
        }
        if (inv) {
            if (r_ != c_ || rk != r_) throw std::domain_error("Mat: not invertible");
            *inv = e;
        }
        return rk;
    }

    Mat inverse() const {
        Mat inv;
        rank(&inv);
        return inv;
    }

    T det() const {
        assert(r_ == c_);
        Mat m = *this;
        T d(1);
        for (int col = 0; col < c_; ++col) {
            int piv = -1;
            for (int i = col; i < r_; ++i)
                if (!(m(i, col) == T(0))) { piv = i; break; }
            if (piv < 0) return T(0);
            if (piv != col) { m.swap_rows(col, piv); d = -d; }
            d = d * m(col, col);
            T f = T(1) / m(col, col);
            m.scale_row(col, f);
            for (int i = col + 1; i < r_; ++i) {
                T g = m(i, col);
                if (g == T(0)) continue;
                m.add_row(i, col, -g);
            }
        }
        return d;
    }

    // Reduced row echelon form (in place copies), used for canonical subspaces.
    Mat rref() const {
        Mat m = *this;
        int rk = 0;
        for (int col = 0; col < c_ && rk < r_; ++col) {
            int piv = -1;
            for (int i = rk; i < r_; ++i)
                if (!(m(i, col) == T(0))) { piv = i; break; }
            if (piv < 0) continue;
            m.swap_rows(rk, piv);
            T d = m(rk, col);
            m.scale_row(rk, T(1) / d);
            for (int i = 0; i < m.r_; ++i) {
                if (i == rk) continue;
                T f = m(i, col);
                if (f == T(0)) continue;
                m.add_row(i, rk, -f);
            }
            ++rk;
        }
        return m.block(0, 0, rk, c_);
    }

    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int k = 0; k < c_; ++k) std::swap((*this)(i, k), (*this)(j, k));
    }
    void scale_row(int i, const T& s) {
        for (int k = 0; k < c_; ++k) (*this)(i, k) = (*this)(i, k) * s;
    }
    // row_i += s * row_j
    void add_row(int i, int j, const T& s) {
        for (int k = 0; k < c_; ++k) (*this)(i, k) = (*this)(i, k) + s * (*this)(j, k);
    }

  private:
    int r_, c_;
    std::vector<T> a_;
};

// Solve x * A = b for a row vector x (A square invertible).
template <class T>
std::vector<T> solve_row(const Mat<T>& A, const std::vector<T>& b) {
    Mat<T> inv = A.inverse();
    std::vector<T> x(static_cast<size_t>(A.rows()), T(0));
    for (int j = 0; j < A.rows(); ++j) {
        T acc(0);
        for (int i = 0; i < A.rows(); ++i) acc += b[static_cast<size_t>(i)] * inv(i, j);
        x[static_cast<size_t>(j)] = acc;
    }
    return x;
}

}  // namespace exiso
