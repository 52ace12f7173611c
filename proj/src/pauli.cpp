#include "cvd/pauli.hpp"

#include <stdexcept>

namespace cvd {

namespace {

int pauli_code(char c) {
    switch (c) {
        case 'I': return 0;
        case 'X': return 1;
        case 'Y': return 2;
        case 'Z': return 3;
        default: throw std::invalid_argument(std::string("invalid Pauli character '") + c + "'");
    }
}

}  // namespace

PauliString::PauliString(std::string ops) : ops_(std::move(ops)) {
    for (char c : ops_) pauli_code(c);
}

bool PauliString::commutes_with(const PauliString& other) const {
    if (other.size() != size()) throw std::invalid_argument("PauliString: length mismatch");
    int anti = 0;
    for (int k = 0; k < size(); ++k) {
        const int a = pauli_code(ops_[static_cast<std::size_t>(k)]);
        const int b = pauli_code(other.ops_[static_cast<std::size_t>(k)]);
        if (a != 0 && b != 0 && a != b) ++anti;
    }
    return anti % 2 == 0;
}

std::vector<SiteOperator> PauliString::site_operators(int offset) const {
    std::vector<SiteOperator> out;
    for (int k = 0; k < size(); ++k) {
        const int c = pauli_code(ops_[static_cast<std::size_t>(k)]);
        if (c != 0) out.emplace_back(k + offset, Matrix(pauli::by_index(c)));
    }
    return out;
}

PauliString PauliString::embedded(int n, const std::vector<int>& sites) const {
    if (static_cast<int>(sites.size()) != size()) throw std::invalid_argument("PauliString: site list mismatch");
    std::string s(static_cast<std::size_t>(n), 'I');
    for (int k = 0; k < size(); ++k) {
        const int q = sites[static_cast<std::size_t>(k)];
        if (q < 0 || q >= n) throw std::out_of_range("PauliString: site out of range");
        s[static_cast<std::size_t>(q)] = ops_[static_cast<std::size_t>(k)];
    }
    return PauliString(s);
}

Vector PauliString::apply(const Vector& psi) const {
    const int n = size();
    if (psi.size() != (Index{1} << n)) throw std::invalid_argument("PauliString::apply: length mismatch");
    Index flip = 0, zmask = 0, ymask = 0;
    for (int k = 0; k < n; ++k) {
        const Index bit = Index{1} << (n - 1 - k);
        switch (ops_[static_cast<std::size_t>(k)]) {
            case 'X': flip |= bit; break;
            case 'Y': flip |= bit; ymask |= bit; break;
            case 'Z': zmask |= bit; break;
            default: break;
        }
    }
    // Y = i X Z acts on |b> as i (-1)^b |1-b>.
    const int ny = __builtin_popcountll(static_cast<unsigned long long>(ymask));
    const cplx yphase = std::pow(kI, ny);
    Vector out(psi.size());
    for (Index idx = 0; idx < psi.size(); ++idx) {
        const int sign_bits = __builtin_popcountll(static_cast<unsigned long long>(idx & (zmask | ymask)));
        const double sign = sign_bits % 2 ? -1.0 : 1.0;
        out(idx ^ flip) = yphase * sign * psi(idx);
    }
    return out;
}

cplx expectation(const Mps& mps, const PauliString& p) {
    if (p.size() != mps.size()) throw std::invalid_argument("expectation: Pauli length mismatch");
    return expectation(mps, p.site_operators());
}

}  // namespace cvd
