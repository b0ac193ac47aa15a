#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "lgt/rng.hpp"

namespace lgt {

using cplx = std::complex<double>;

// Small dense complex matrix, dimension <= 3 (largest irrep in the catalog).
struct CMat {
    int n = 0;
    std::array<cplx, 9> a{};

    static CMat ident(int n);
    static CMat zero(int n);

    cplx& at(int r, int c) { return a[static_cast<size_t>(r * n + c)]; }
    const cplx& at(int r, int c) const { return a[static_cast<size_t>(r * n + c)]; }

    CMat mul(const CMat& other) const;
    CMat adjoint() const;
    CMat scaled(cplx s) const;
    CMat add(const CMat& other) const;
    cplx trace() const;
    double frob_norm() const;
    double op_norm() const;                 // spectral norm
    double max_abs_diff(const CMat& other) const;
    bool is_unitary(double tol) const;
};

enum class GroupKind { Cyclic, Circle, SpecialUnitary2 };

struct GroupSpec {
    GroupKind kind = GroupKind::Cyclic;
    int n = 2; // order, cyclic only

    static GroupSpec cyclic(int n);
    static GroupSpec circle();
    static GroupSpec su2();
    static GroupSpec parse(const std::string& name); // "Z2","Z3","Z4","U1","SU2"

    std::string name() const;
    bool operator==(const GroupSpec& o) const { return kind == o.kind && (kind != GroupKind::Cyclic || n == o.n); }
    bool is_finite() const { return kind == GroupKind::Cyclic; }
    int defining_dim() const { return kind == GroupKind::SpecialUnitary2 ? 2 : 1; }
};

// Unit quaternion w + xi + yj + zk <-> SU(2) matrix [[w+ix, y+iz], [-y+iz, w-ix]].
struct Quat {
    double w = 1, x = 0, y = 0, z = 0;

    Quat mul(const Quat& o) const {
        return Quat{w * o.w - x * o.x - y * o.y - z * o.z,
                    w * o.x + x * o.w + y * o.z - z * o.y,
                    w * o.y - x * o.z + y * o.w + z * o.x,
                    w * o.z + x * o.y - y * o.x + z * o.w};
    }
    Quat conj() const { return Quat{w, -x, -y, -z}; }
    double norm2() const { return w * w + x * x + y * y + z * z; }
    Quat normalized() const;
};

struct GroupElement {
    GroupKind kind = GroupKind::Cyclic;
    int residue = 0;   // cyclic: j in {0..n-1}, element exp(2*pi*i*j/n)
    double theta = 0;  // circle: angle in [0, 2*pi)
    Quat q;            // su2: unit quaternion
};

GroupElement identity(const GroupSpec& spec);
GroupElement mul(const GroupSpec& spec, const GroupElement& a, const GroupElement& b);
GroupElement inv(const GroupSpec& spec, const GroupElement& a);
bool elements_equal(const GroupSpec& spec, const GroupElement& a, const GroupElement& b, double tol = 1e-12);

GroupElement make_cyclic(const GroupSpec& spec, int j);
GroupElement make_circle(double theta);
GroupElement make_su2(const Quat& q);

GroupElement haar_sample(const GroupSpec& spec, RngStream& rng);

// Defining (matrix) form; Re Tr of it drives the Hamiltonian.
CMat defining_matrix(const GroupSpec& spec, const GroupElement& g);
double re_tr_defining(const GroupSpec& spec, const GroupElement& g);

enum class RepKind { CyclicCharacter, CircleCharge, Su2Fundamental, Su2Adjoint, Su2Trivial };

struct Representation {
    GroupSpec group;
    RepKind kind = RepKind::CyclicCharacter;
    int label = 0; // character index k (cyclic) or charge q (circle)
    int dim = 1;

    static Representation cyclic_character(const GroupSpec& g, int k);
    static Representation circle_charge(int q);
    static Representation su2_fundamental();
    static Representation su2_adjoint();
    static Representation su2_trivial();
    // "fund", "char:k", "charge:q", "adjoint", "trivial"
    static Representation parse(const GroupSpec& g, const std::string& name);
    std::string name() const;
    bool self_conjugate() const;
};

CMat rep_matrix(const Representation& rep, const GroupElement& g);
cplx rep_character(const Representation& rep, const GroupElement& g);

// Finite generating sample for the circle; exact center for the others.
std::vector<GroupElement> center_elements(const GroupSpec& spec);
// Commutator test against haar_samples (defining matrix form).
bool is_central(const GroupSpec& spec, const GroupElement& g, int samples = 100, double tol = 1e-10);
// c with rep_matrix(rep, g0) = c*I; throws if g0 fails the centrality test.
cplx center_scalar(const Representation& rep, const GroupElement& g0);
bool acts_nontrivially_on_center(const Representation& rep);

} // namespace lgt
