#include "lgt/group.hpp"

#include <cmath>
#include <stdexcept>

namespace lgt {

namespace {
constexpr double two_pi = 6.283185307179586476925286766559;

double reduce_angle(double t) {
    t = std::fmod(t, two_pi);
    if (t < 0) t += two_pi;
    if (t >= two_pi) t = 0; // fmod can land exactly on 2*pi after the shift
    return t;
}

void require_same(const GroupSpec& spec, const GroupElement& g, const char* what) {
    if (g.kind != spec.kind)
        throw std::invalid_argument(std::string("group element kind mismatch in ") + what);
}
} // namespace

CMat CMat::ident(int n) {
    CMat m;
    m.n = n;
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

CMat CMat::zero(int n) {
    CMat m;
    m.n = n;
    return m;
}

CMat CMat::mul(const CMat& o) const {
    CMat r = CMat::zero(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            cplx aik = at(i, k);
            for (int j = 0; j < n; ++j) r.at(i, j) += aik * o.at(k, j);
        }
    return r;
}

CMat CMat::adjoint() const {
    CMat r = CMat::zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.at(i, j) = std::conj(at(j, i));
    return r;
}

CMat CMat::scaled(cplx s) const {
    CMat r = *this;
    for (auto& v : r.a) v *= s;
    return r;
}

CMat CMat::add(const CMat& o) const {
    CMat r = *this;
    for (size_t i = 0; i < a.size(); ++i) r.a[i] += o.a[i];
    return r;
}

cplx CMat::trace() const {
    cplx t = 0;
    for (int i = 0; i < n; ++i) t += at(i, i);
    return t;
}

double CMat::frob_norm() const {
    double s = 0;
    for (int i = 0; i < n * n; ++i) s += std::norm(a[static_cast<size_t>(i)]);
    return std::sqrt(s);
}

double CMat::op_norm() const {
    if (n == 0) return 0;
    if (n == 1) return std::abs(a[0]);
    // power iteration on A^dag A; dimension <= 3 so a fixed iteration count converges
    CMat m = adjoint().mul(*this);
    std::array<cplx, 3> v{cplx(1, 0.3), cplx(0.7, -0.2), cplx(-0.4, 0.9)};
    double lam = 0;
    for (int it = 0; it < 200; ++it) {
        std::array<cplx, 3> w{};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) w[static_cast<size_t>(i)] += m.at(i, j) * v[static_cast<size_t>(j)];
        double norm = 0;
        for (int i = 0; i < n; ++i) norm += std::norm(w[static_cast<size_t>(i)]);
        norm = std::sqrt(norm);
        if (norm == 0) return 0;
        lam = norm;
        for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = w[static_cast<size_t>(i)] / norm;
    }
    return std::sqrt(lam);
}

double CMat::max_abs_diff(const CMat& o) const {
    double m = 0;
    for (int i = 0; i < n * n; ++i) m = std::max(m, std::abs(a[static_cast<size_t>(i)] - o.a[static_cast<size_t>(i)]));
    return m;
}

bool CMat::is_unitary(double tol) const {
    return adjoint().mul(*this).max_abs_diff(CMat::ident(n)) <= tol;
}

GroupSpec GroupSpec::cyclic(int n) {
    if (n < 2) throw std::invalid_argument("cyclic group needs n >= 2");
    GroupSpec s;
    s.kind = GroupKind::Cyclic;
    s.n = n;
    return s;
}

GroupSpec GroupSpec::circle() {
    GroupSpec s;
    s.kind = GroupKind::Circle;
    s.n = 0;
    return s;
}

GroupSpec GroupSpec::su2() {
    GroupSpec s;
    s.kind = GroupKind::SpecialUnitary2;
    s.n = 0;
    return s;
}

GroupSpec GroupSpec::parse(const std::string& name) {
    if (name == "U1") return circle();
    if (name == "SU2") return su2();
    if (name.size() >= 2 && name[0] == 'Z') {
        int n = std::stoi(name.substr(1));
        return cyclic(n);
    }
    throw std::invalid_argument("unknown group name: " + name);
}

std::string GroupSpec::name() const {
    switch (kind) {
        case GroupKind::Cyclic: return "Z" + std::to_string(n);
        case GroupKind::Circle: return "U1";
        case GroupKind::SpecialUnitary2: return "SU2";
    }
    return "?";
}

Quat Quat::normalized() const {
    double r = std::sqrt(norm2());
    return Quat{w / r, x / r, y / r, z / r};
}

GroupElement identity(const GroupSpec& spec) {
    GroupElement g;
    g.kind = spec.kind;
    g.residue = 0;
    g.theta = 0;
    g.q = Quat{1, 0, 0, 0};
    return g;
}

GroupElement make_cyclic(const GroupSpec& spec, int j) {
    if (spec.kind != GroupKind::Cyclic) throw std::invalid_argument("make_cyclic on non-cyclic spec");
    GroupElement g;
    g.kind = GroupKind::Cyclic;
    g.residue = ((j % spec.n) + spec.n) % spec.n;
    return g;
}

GroupElement make_circle(double theta) {
    GroupElement g;
    g.kind = GroupKind::Circle;
    g.theta = reduce_angle(theta);
    return g;
}

GroupElement make_su2(const Quat& q) {
    GroupElement g;
    g.kind = GroupKind::SpecialUnitary2;
    g.q = q.normalized();
    return g;
}

GroupElement mul(const GroupSpec& spec, const GroupElement& a, const GroupElement& b) {
    require_same(spec, a, "mul");
    require_same(spec, b, "mul");
    GroupElement g;
    g.kind = spec.kind;
    switch (spec.kind) {
        case GroupKind::Cyclic:
            g.residue = a.residue + b.residue;
            if (g.residue >= spec.n) g.residue -= spec.n;
            break;
        case GroupKind::Circle:
            g.theta = reduce_angle(a.theta + b.theta);
            break;
        case GroupKind::SpecialUnitary2: {
            g.q = a.q.mul(b.q);
            // drift control: renormalize every 2^20 products
            static thread_local uint32_t count = 0;
            if (((++count) & 0xfffffu) == 0) g.q = g.q.normalized();
            break;
        }
    }
    return g;
}

GroupElement inv(const GroupSpec& spec, const GroupElement& a) {
    require_same(spec, a, "inv");
    GroupElement g;
    g.kind = spec.kind;
    switch (spec.kind) {
        case GroupKind::Cyclic:
            g.residue = a.residue == 0 ? 0 : spec.n - a.residue;
            break;
        case GroupKind::Circle:
            g.theta = a.theta == 0 ? 0 : two_pi - a.theta;
            g.theta = reduce_angle(g.theta);
            break;
        case GroupKind::SpecialUnitary2:
            g.q = a.q.conj();
            break;
    }
    return g;
}

bool elements_equal(const GroupSpec& spec, const GroupElement& a, const GroupElement& b, double tol) {
    switch (spec.kind) {
        case GroupKind::Cyclic: return a.residue == b.residue;
        case GroupKind::Circle: {
            double d = std::abs(a.theta - b.theta);
            return d <= tol || std::abs(d - two_pi) <= tol;
        }
        case GroupKind::SpecialUnitary2: {
            double d2 = (a.q.w - b.q.w) * (a.q.w - b.q.w) + (a.q.x - b.q.x) * (a.q.x - b.q.x) +
                        (a.q.y - b.q.y) * (a.q.y - b.q.y) + (a.q.z - b.q.z) * (a.q.z - b.q.z);
            return std::sqrt(d2) <= tol;
        }
    }
    return false;
}

GroupElement haar_sample(const GroupSpec& spec, RngStream& rng) {
    GroupElement g;
    g.kind = spec.kind;
    switch (spec.kind) {
        case GroupKind::Cyclic:
            g.residue = rng.uniform_int(spec.n);
            break;
        case GroupKind::Circle:
            g.theta = reduce_angle(rng.uniform() * two_pi);
            break;
        case GroupKind::SpecialUnitary2: {
            // four iid normals normalized: uniform on the 3-sphere
            Quat q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
            while (q.norm2() < 1e-20) q = Quat{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
            g.q = q.normalized();
            break;
        }
    }
    return g;
}

CMat defining_matrix(const GroupSpec& spec, const GroupElement& g) {
    switch (spec.kind) {
        case GroupKind::Cyclic: {
            CMat m = CMat::zero(1);
            double ang = two_pi * g.residue / spec.n;
            m.a[0] = cplx(std::cos(ang), std::sin(ang));
            return m;
        }
        case GroupKind::Circle: {
            CMat m = CMat::zero(1);
            m.a[0] = cplx(std::cos(g.theta), std::sin(g.theta));
            return m;
        }
        case GroupKind::SpecialUnitary2: {
            // w + xi + yj + zk  <->  [[w+ix, y+iz], [-y+iz, w-ix]]
            CMat m = CMat::zero(2);
            const Quat& q = g.q;
            m.at(0, 0) = cplx(q.w, q.x);
            m.at(0, 1) = cplx(q.y, q.z);
            m.at(1, 0) = cplx(-q.y, q.z);
            m.at(1, 1) = cplx(q.w, -q.x);
            return m;
        }
    }
    return CMat{};
}

double re_tr_defining(const GroupSpec& spec, const GroupElement& g) {
    switch (spec.kind) {
        case GroupKind::Cyclic: {
            // canonical residue: j and n-j share one cosine value bit-for-bit
            int j = std::min(g.residue, spec.n - g.residue);
            return std::cos(two_pi * j / spec.n);
        }
        case GroupKind::Circle: return std::cos(g.theta);
        case GroupKind::SpecialUnitary2: return 2.0 * g.q.w;
    }
    return 0;
}

Representation Representation::cyclic_character(const GroupSpec& g, int k) {
    if (g.kind != GroupKind::Cyclic) throw std::invalid_argument("cyclic character needs a cyclic group");
    Representation r;
    r.group = g;
    r.kind = RepKind::CyclicCharacter;
    r.label = ((k % g.n) + g.n) % g.n;
    r.dim = 1;
    return r;
}

Representation Representation::circle_charge(int q) {
    Representation r;
    r.group = GroupSpec::circle();
    r.kind = RepKind::CircleCharge;
    r.label = q;
    r.dim = 1;
    return r;
}

Representation Representation::su2_fundamental() {
    Representation r;
    r.group = GroupSpec::su2();
    r.kind = RepKind::Su2Fundamental;
    r.dim = 2;
    return r;
}

Representation Representation::su2_adjoint() {
    Representation r;
    r.group = GroupSpec::su2();
    r.kind = RepKind::Su2Adjoint;
    r.dim = 3;
    return r;
}

Representation Representation::su2_trivial() {
    Representation r;
    r.group = GroupSpec::su2();
    r.kind = RepKind::Su2Trivial;
    r.dim = 1;
    return r;
}

Representation Representation::parse(const GroupSpec& g, const std::string& name) {
    if (name == "fund") {
        if (g.kind == GroupKind::SpecialUnitary2) return su2_fundamental();
        if (g.kind == GroupKind::Cyclic) return cyclic_character(g, 1);
        if (g.kind == GroupKind::Circle) return circle_charge(1);
    }
    if (name.rfind("char:", 0) == 0) return cyclic_character(g, std::stoi(name.substr(5)));
    if (name.rfind("charge:", 0) == 0 && g.kind == GroupKind::Circle) return circle_charge(std::stoi(name.substr(7)));
    if (name == "adjoint" && g.kind == GroupKind::SpecialUnitary2) return su2_adjoint();
    if (name == "trivial") {
        if (g.kind == GroupKind::SpecialUnitary2) return su2_trivial();
        if (g.kind == GroupKind::Cyclic) return cyclic_character(g, 0);
        if (g.kind == GroupKind::Circle) return circle_charge(0);
    }
    throw std::invalid_argument("unknown representation name: " + name + " for group " + g.name());
}

std::string Representation::name() const {
    switch (kind) {
        case RepKind::CyclicCharacter: return "char:" + std::to_string(label);
        case RepKind::CircleCharge: return "charge:" + std::to_string(label);
        case RepKind::Su2Fundamental: return "fund";
        case RepKind::Su2Adjoint: return "adjoint";
        case RepKind::Su2Trivial: return "trivial";
    }
    return "?";
}

bool Representation::self_conjugate() const {
    switch (kind) {
        case RepKind::CyclicCharacter: return label == 0 || 2 * label == group.n;
        case RepKind::CircleCharge: return label == 0;
        case RepKind::Su2Fundamental: return true; // real character
        case RepKind::Su2Adjoint: return true;
        case RepKind::Su2Trivial: return true;
    }
    return false;
}

CMat rep_matrix(const Representation& rep, const GroupElement& g) {
    if (g.kind != rep.group.kind) throw std::invalid_argument("rep_matrix: group element kind mismatch");
    switch (rep.kind) {
        case RepKind::CyclicCharacter: {
            CMat m = CMat::zero(1);
            double ang = two_pi * ((static_cast<long long>(rep.label) * g.residue) % rep.group.n) / rep.group.n;
            m.a[0] = cplx(std::cos(ang), std::sin(ang));
            return m;
        }
        case RepKind::CircleCharge: {
            CMat m = CMat::zero(1);
            double ang = rep.label * g.theta;
            m.a[0] = cplx(std::cos(ang), std::sin(ang));
            return m;
        }
        case RepKind::Su2Fundamental:
            return defining_matrix(rep.group, g);
        case RepKind::Su2Adjoint: {
            // conjugation action on span{i,j,k}: the rotation matrix of the quaternion
            const Quat& q = g.q;
            double w = q.w, x = q.x, y = q.y, z = q.z;
            CMat m = CMat::zero(3);
            m.at(0, 0) = 1 - 2 * (y * y + z * z);
            m.at(0, 1) = 2 * (x * y - w * z);
            m.at(0, 2) = 2 * (x * z + w * y);
            m.at(1, 0) = 2 * (x * y + w * z);
            m.at(1, 1) = 1 - 2 * (x * x + z * z);
            m.at(1, 2) = 2 * (y * z - w * x);
            m.at(2, 0) = 2 * (x * z - w * y);
            m.at(2, 1) = 2 * (y * z + w * x);
            m.at(2, 2) = 1 - 2 * (x * x + y * y);
            return m;
        }
        case RepKind::Su2Trivial:
            return CMat::ident(1);
    }
    return CMat{};
}

cplx rep_character(const Representation& rep, const GroupElement& g) {
    return rep_matrix(rep, g).trace();
}

std::vector<GroupElement> center_elements(const GroupSpec& spec) {
    std::vector<GroupElement> out;
    switch (spec.kind) {
        case GroupKind::Cyclic:
            for (int j = 0; j < spec.n; ++j) out.push_back(make_cyclic(spec, j));
            break;
        case GroupKind::Circle:
            // the whole group is the center; a fixed generating sample of angles
            for (int k = 0; k < 16; ++k) out.push_back(make_circle(two_pi * k / 16.0));
            break;
        case GroupKind::SpecialUnitary2:
            out.push_back(make_su2(Quat{1, 0, 0, 0}));
            out.push_back(make_su2(Quat{-1, 0, 0, 0}));
            break;
    }
    return out;
}

bool is_central(const GroupSpec& spec, const GroupElement& g, int samples, double tol) {
    if (spec.kind != GroupKind::SpecialUnitary2) return true; // abelian groups
    RngStream rng(0x5eedc0de);
    CMat mg = defining_matrix(spec, g);
    for (int i = 0; i < samples; ++i) {
        CMat mh = defining_matrix(spec, haar_sample(spec, rng));
        if (mg.mul(mh).max_abs_diff(mh.mul(mg)) > tol) return false;
    }
    return true;
}

cplx center_scalar(const Representation& rep, const GroupElement& g0) {
    if (!is_central(rep.group, g0)) throw std::invalid_argument("center_scalar: element fails the centrality test");
    CMat m = rep_matrix(rep, g0);
    cplx c = m.trace() / static_cast<double>(rep.dim);
    if (m.max_abs_diff(CMat::ident(rep.dim).scaled(c)) > 1e-10)
        throw std::runtime_error("center_scalar: representation matrix is not scalar");
    return c;
}

bool acts_nontrivially_on_center(const Representation& rep) {
    for (const auto& g0 : center_elements(rep.group)) {
        cplx c = center_scalar(rep, g0);
        if (std::abs(c - 1.0) > 1e-10) return true;
    }
    return false;
}

} // namespace lgt
