#pragma once

#include <random>
#include <string>
#include <vector>

namespace heapstone {

/// Simplicial set whose simplices are values of type S; only face,
/// degeneracy and equality need to be computable.
template <class S>
class LocallyEffectiveSet {
public:
    virtual ~LocallyEffectiveSet() = default;
    virtual int dimension_of(const S& s) const = 0;
    virtual S face(const S& s, int i) const = 0;
    virtual S degeneracy(const S& s, int j) const = 0;
    virtual bool equal(const S& a, const S& b) const = 0;
};

/// Checks d_i d_j = d_{j-1} d_i (i<j), d_i s_j, and s_i s_j on the given
/// samples. Returns a description of every violation found.
template <class S>
std::vector<std::string> spot_check_identities(const LocallyEffectiveSet<S>& X, const std::vector<S>& samples)
{
    std::vector<std::string> bad;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const S& s = samples[k];
        int q = X.dimension_of(s);
        auto tag = [&](const std::string& what, int i, int j) {
            bad.push_back("sample " + std::to_string(k) + ": " + what + " i=" + std::to_string(i) +
                          " j=" + std::to_string(j));
        };
        for (int j = 0; j <= q && q >= 1; ++j)
            for (int i = 0; i < j; ++i)
                if (q >= 2 && !X.equal(X.face(X.face(s, j), i), X.face(X.face(s, i), j - 1))) tag("d_i d_j", i, j);
        for (int j = 0; j <= q; ++j) {
            S sj = X.degeneracy(s, j);
            for (int i = 0; i <= q + 1; ++i) {
                S lhs = X.face(sj, i);
                if (i == j || i == j + 1) {
                    if (!X.equal(lhs, s)) tag("d_i s_j = id", i, j);
                } else if (q >= 1) {
                    S rhs = i < j ? X.degeneracy(X.face(s, i), j - 1) : X.degeneracy(X.face(s, i - 1), j);
                    if (!X.equal(lhs, rhs)) tag("d_i s_j", i, j);
                }
            }
            for (int i = 0; i <= j; ++i)
                if (!X.equal(X.degeneracy(sj, i), X.degeneracy(X.degeneracy(s, i), j + 1))) tag("s_i s_j", i, j);
        }
    }
    return bad;
}

}  // namespace heapstone
