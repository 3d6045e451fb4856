#include "qwalk/synthesis.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <unordered_map>

namespace qwalk {

namespace {

const cplx kOmega = std::polar(1.0, M_PI / 4.0);

MatrixXcd item_matrix(const SeqItem& it, int n_wires) {
    MatrixXcd m = MatrixXcd::Identity(n_wires, n_wires);
    switch (it.kind) {
        case SeqItem::Kind::u1pow:
            m(it.w0, it.w0) = std::pow(kOmega, it.pow);
            return m;
        case SeqItem::Kind::u2pow: {
            Matrix2cd u = Matrix2cd::Identity();
            for (int i = 0; i < it.pow; ++i) u = u2_matrix() * u;
            m(it.w0, it.w0) = u(0, 0);
            m(it.w0, it.w1) = u(0, 1);
            m(it.w1, it.w0) = u(1, 0);
            m(it.w1, it.w1) = u(1, 1);
            return m;
        }
        case SeqItem::Kind::crossing: {
            m.setZero();
            for (int i = 0; i < n_wires; ++i) m(it.perm[i], i) = 1.0;
            return m;
        }
    }
    throw std::logic_error("unreachable");
}

// --- exact synthesis table for the 2x2 group generated by u1, u2 ---------

struct TableEntry {
    std::string word;  // 'a' = u1, 'b' = u2, applied left to right
    Matrix2cd value;
};

using Key = std::array<long long, 8>;

struct KeyHash {
    size_t operator()(const Key& k) const {
        size_t h = 1469598103934665603ull;
        for (long long v : k) {
            h ^= static_cast<size_t>(v);
            h *= 1099511628211ull;
        }
        return h;
    }
};

Key quantize(const Matrix2cd& m) {
    Key k;
    int idx = 0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            k[idx++] = llround(m(r, c).real() * 1e5);
            k[idx++] = llround(m(r, c).imag() * 1e5);
        }
    return k;
}

// Canonical representative modulo the global phase group <omega>: the
// lexicographically smallest of the eight rotations.
Key canonical_key(const Matrix2cd& m) {
    Key best{};
    bool first = true;
    cplx phase(1.0, 0.0);
    for (int t = 0; t < 8; ++t) {
        Key k = quantize(phase * m);
        if (first || k < best) {
            best = k;
            first = false;
        }
        phase *= kOmega;
    }
    return best;
}

class SynthesisTable {
  public:
    static const SynthesisTable& instance() {
        static SynthesisTable table;
        return table;
    }

    // Finds a word whose product equals omega^gp * m; returns false if the
    // class is outside the explored ball.
    bool lookup(const Matrix2cd& m, std::string& word, int& gp) const {
        auto it = map_.find(canonical_key(m));
        const TableEntry* entry = nullptr;
        if (it != map_.end()) {
            entry = &entries_[it->second];
        } else {
            // Tolerant fallback against quantization boundaries.
            for (const auto& e : entries_) {
                if (phase_distance(e.value, m) < 1e-8) {
                    entry = &e;
                    break;
                }
            }
        }
        if (!entry) return false;
        for (int t = 0; t < 8; ++t) {
            if ((entry->value - std::pow(kOmega, t) * m).cwiseAbs().maxCoeff() < 1e-8) {
                word = entry->word;
                gp = t;
                return true;
            }
        }
        return false;
    }

  private:
    static double phase_distance(const Matrix2cd& a, const Matrix2cd& b) {
        double best = 1e300;
        for (int t = 0; t < 8; ++t)
            best = std::min(best,
                            (a - std::pow(kOmega, t) * b).cwiseAbs().maxCoeff());
        return best;
    }

    SynthesisTable() {
        const int max_depth = 14;
        const Matrix2cd gens[2] = {u1_matrix(), u2_matrix()};
        const char names[2] = {'a', 'b'};
        std::deque<size_t> queue;
        add(TableEntry{"", Matrix2cd::Identity()});
        // Pin the Hadamard class to the standard word u1^2 u2 u1^2, whose
        // product is i*H; a shorter word exists but with a different phase.
        add(TableEntry{"aabaa",
                       u1_matrix() * u1_matrix() * u2_matrix() * u1_matrix() *
                           u1_matrix()});
        queue.push_back(0);
        while (!queue.empty()) {
            size_t idx = queue.front();
            queue.pop_front();
            if (entries_[idx].word.size() >= max_depth) continue;
            for (int g = 0; g < 2; ++g) {
                TableEntry next;
                next.word = entries_[idx].word + names[g];
                next.value = gens[g] * entries_[idx].value;
                Key key = canonical_key(next.value);
                if (map_.count(key)) continue;
                map_.emplace(key, entries_.size());
                queue.push_back(entries_.size());
                entries_.push_back(std::move(next));
            }
        }
    }

    void add(TableEntry e) {
        map_.emplace(canonical_key(e.value), entries_.size());
        entries_.push_back(std::move(e));
    }

    std::vector<TableEntry> entries_;
    std::unordered_map<Key, size_t, KeyHash> map_;
};

// Compresses a generator word into u1pow/u2pow items on wires (w0, w1).
std::vector<SeqItem> word_to_items(const std::string& word, int w0, int w1) {
    std::vector<SeqItem> items;
    size_t i = 0;
    while (i < word.size()) {
        size_t j = i;
        while (j < word.size() && word[j] == word[i]) ++j;
        int run = static_cast<int>(j - i);
        SeqItem it;
        if (word[i] == 'a') {
            it.kind = SeqItem::Kind::u1pow;
            it.pow = run % 8;
            it.w0 = w1;  // u1 phases the second wire of the pair
        } else {
            it.kind = SeqItem::Kind::u2pow;
            it.pow = run % 4;
            it.w0 = w0;
            it.w1 = w1;
        }
        if (it.pow != 0) items.push_back(it);
        i = j;
    }
    return items;
}

bool is_unitary(const MatrixXcd& m, double tol) {
    MatrixXcd g = m.adjoint() * m;
    return (g - MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < tol;
}

int phase_eighths(cplx z, double tol = 1e-9) {
    if (std::abs(std::abs(z) - 1.0) > tol) return -1;
    for (int t = 0; t < 8; ++t)
        if (std::abs(z - std::pow(kOmega, t)) < tol) return t;
    return -1;
}

}  // namespace

MatrixXcd GateSequence::matrix() const {
    MatrixXcd m = MatrixXcd::Identity(n_wires, n_wires);
    for (const auto& it : items) m = item_matrix(it, n_wires) * m;
    return std::pow(kOmega, ((pad_units % 8) + 8) % 8) * m;
}

int GateSequence::path_phase_units() const {
    // One path unit per gate core, plus the recorded global phase.
    int units = global_phase_eighths;
    for (const auto& it : items)
        if (it.kind == SeqItem::Kind::u2pow) units += it.pow;
    return ((units % 8) + 8) % 8;
}

GateSequence synthesize_unitary(const Eigen::Matrix2cd& m) {
    if (!is_unitary(m, 1e-10))
        throw std::invalid_argument("synthesis target is not unitary");
    std::string word;
    int gp = 0;
    if (!SynthesisTable::instance().lookup(m, word, gp))
        throw NotExactlyRepresentable(m);
    GateSequence seq;
    seq.n_wires = 2;
    seq.items = word_to_items(word, 0, 1);
    seq.global_phase_eighths = gp;
    return seq;
}

GateSequence synthesize_unitary(const Eigen::Matrix4cd& m) {
    if (!is_unitary(m, 1e-10))
        throw std::invalid_argument("synthesis target is not unitary");

    // Split the nonzero pattern into connected (rows x cols) components.
    const double tol = 1e-9;
    std::array<int, 4> row_comp{-1, -1, -1, -1}, col_comp{-1, -1, -1, -1};
    int n_comp = 0;
    for (int seed = 0; seed < 4; ++seed) {
        if (row_comp[seed] >= 0) continue;
        int comp = n_comp++;
        std::vector<int> stack_rows = {seed};
        row_comp[seed] = comp;
        while (!stack_rows.empty()) {
            int r = stack_rows.back();
            stack_rows.pop_back();
            for (int c = 0; c < 4; ++c) {
                if (std::abs(m(r, c)) <= tol || col_comp[c] >= 0) continue;
                col_comp[c] = comp;
                for (int r2 = 0; r2 < 4; ++r2) {
                    if (std::abs(m(r2, c)) > tol && row_comp[r2] < 0) {
                        row_comp[r2] = comp;
                        stack_rows.push_back(r2);
                    }
                }
            }
        }
    }

    GateSequence seq;
    seq.n_wires = 4;
    std::vector<int> perm(4, -1);  // input wire -> wire after the crossing
    std::vector<SeqItem> gate_items;

    for (int comp = 0; comp < n_comp; ++comp) {
        std::vector<int> rows, cols;
        for (int i = 0; i < 4; ++i) {
            if (row_comp[i] == comp) rows.push_back(i);
            if (col_comp[i] == comp) cols.push_back(i);
        }
        if (rows.size() != cols.size()) throw NotExactlyRepresentable(m);
        if (rows.size() == 1) {
            int ph = phase_eighths(m(rows[0], cols[0]));
            if (ph < 0) throw NotExactlyRepresentable(m);
            perm[cols[0]] = rows[0];
            if (ph != 0) {
                SeqItem it;
                it.kind = SeqItem::Kind::u1pow;
                it.pow = ph;
                it.w0 = rows[0];
                gate_items.push_back(it);
            }
        } else if (rows.size() == 2) {
            Matrix2cd block;
            block << m(rows[0], cols[0]), m(rows[0], cols[1]),
                     m(rows[1], cols[0]), m(rows[1], cols[1]);
            GateSequence sub = synthesize_unitary(block);
            perm[cols[0]] = rows[0];
            perm[cols[1]] = rows[1];
            for (SeqItem it : sub.items) {
                it.w0 = (it.w0 == 0) ? rows[0] : rows[1];
                it.w1 = (it.w1 == 0) ? rows[0] : rows[1];
                gate_items.push_back(it);
            }
            // Cancel the block's synthesis phase on both of its wires so the
            // assembled 4x4 product equals m exactly.
            int back = (8 - sub.global_phase_eighths) % 8;
            if (back != 0) {
                for (int w : {rows[0], rows[1]}) {
                    SeqItem it;
                    it.kind = SeqItem::Kind::u1pow;
                    it.pow = back;
                    it.w0 = w;
                    gate_items.push_back(it);
                }
            }
        } else {
            throw NotExactlyRepresentable(m);
        }
    }

    bool is_identity_perm = true;
    for (int i = 0; i < 4; ++i)
        if (perm[i] != i) is_identity_perm = false;
    if (!is_identity_perm) {
        SeqItem cross;
        cross.kind = SeqItem::Kind::crossing;
        cross.perm = perm;
        seq.items.push_back(cross);
    }
    for (auto& it : gate_items) seq.items.push_back(std::move(it));
    seq.global_phase_eighths = 0;

    if ((seq.matrix() - m).cwiseAbs().maxCoeff() > 1e-9)
        throw NotExactlyRepresentable(m);
    return seq;
}

GateSequence conjugate_sequence(const GateSequence& g) {
    GateSequence out;
    out.n_wires = g.n_wires;
    int conj_cores = 0;
    for (const auto& it : g.items) {
        SeqItem c = it;
        if (it.kind == SeqItem::Kind::u1pow) {
            c.pow = (8 - it.pow) % 8;
            if (c.pow == 0) continue;
        } else if (it.kind == SeqItem::Kind::u2pow) {
            if (it.pow == 0) continue;
            c.pow = (4 - it.pow) % 4;
            ++conj_cores;
        }
        out.items.push_back(std::move(c));
    }
    out.pad_units = (((4 * conj_cores - g.pad_units) % 8) + 8) % 8;
    out.global_phase_eighths = (8 - g.global_phase_eighths % 8) % 8;
    return out;
}

Matrix4cd pauli_transform_matrix() {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    Matrix4cd m;
    // rows: a0, a1, a2, a3 against wire order (rho00, rho11, rho01, rho10)
    m << s, s, 0, 0,
         0, 0, s, s,
         0, 0, i * s, -i * s,
         s, -s, 0, 0;
    return m;
}

Vector4cd pauli_transform(const Vector4cd& wire_vec) {
    return pauli_transform_matrix() * wire_vec;
}

}  // namespace qwalk
