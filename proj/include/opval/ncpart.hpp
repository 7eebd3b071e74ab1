#pragma once

// Noncrossing partitions of {1..n} and star-words over {a, a*}.
//
// Partitions are kept in canonical form: each block sorted ascending, blocks
// ordered by least element. Enumeration is generated recursively (elements
// either open a new block or rejoin an open one, closing everything opened
// in between), which produces every noncrossing partition exactly once.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace opval {

class partition {
  public:
    partition(int n, std::vector<std::vector<int>> blocks) : n_(n), blocks_(std::move(blocks)) {
        for (const auto& b : blocks_)
            if (b.empty()) throw std::invalid_argument("empty block");
        canonicalize();
        validate();
    }

    static partition full(int n) {
        std::vector<int> b(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) b[static_cast<size_t>(i)] = i + 1;
        return partition(n, {std::move(b)}, unchecked_tag{});
    }

    int n() const { return n_; }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    int block_count() const { return static_cast<int>(blocks_.size()); }

    friend bool operator==(const partition&, const partition&) = default;
    friend bool operator<(const partition& a, const partition& b) {
        if (a.n_ != b.n_) return a.n_ < b.n_;
        return a.blocks_ < b.blocks_;  // lexicographic on canonical form
    }

    static bool is_noncrossing(const std::vector<std::vector<int>>& blocks) {
        for (size_t x = 0; x < blocks.size(); ++x)
            for (size_t y = x + 1; y < blocks.size(); ++y)
                if (blocks_cross(blocks[x], blocks[y])) return false;
        return true;
    }

  private:
    struct unchecked_tag {};
    partition(int n, std::vector<std::vector<int>> blocks, unchecked_tag)
        : n_(n), blocks_(std::move(blocks)) {}

    void canonicalize() {
        for (auto& b : blocks_) std::sort(b.begin(), b.end());
        std::sort(blocks_.begin(), blocks_.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
    }

    void validate() const {
        if (n_ < 1) throw std::invalid_argument("partition of empty set");
        std::vector<char> seen(static_cast<size_t>(n_) + 1, 0);
        for (const auto& b : blocks_) {
            if (b.empty()) throw std::invalid_argument("empty block");
            for (int e : b) {
                if (e < 1 || e > n_) throw std::invalid_argument("element out of range");
                if (seen[static_cast<size_t>(e)]) throw std::invalid_argument("duplicate element");
                seen[static_cast<size_t>(e)] = 1;
            }
        }
        for (int e = 1; e <= n_; ++e)
            if (!seen[static_cast<size_t>(e)]) throw std::invalid_argument("missing element");
        if (!is_noncrossing(blocks_)) throw std::invalid_argument("partition is crossing");
    }

    // two blocks cross iff their merged label sequence alternates X,Y,X,Y
    static bool blocks_cross(const std::vector<int>& x, const std::vector<int>& y) {
        size_t i = 0, j = 0;
        int runs = 0, last = -1;
        while (i < x.size() || j < y.size()) {
            int lab;
            if (j >= y.size() || (i < x.size() && x[i] < y[j])) { lab = 0; ++i; }
            else { lab = 1; ++j; }
            if (lab != last) { ++runs; last = lab; }
        }
        return runs >= 4;
    }

    int n_;
    std::vector<std::vector<int>> blocks_;

    template <typename F>
    friend void for_each_noncrossing(int n, F&& fn);
};

inline constexpr int nc_max_n = 14;  // Catalan(14) = 2674440, the practical bound

inline unsigned long long catalan(int n) {
    if (n < 0 || n > 30) throw std::invalid_argument("catalan argument out of range");
    std::vector<unsigned long long> c(static_cast<size_t>(n) + 1, 0);
    c[0] = 1;
    for (int m = 1; m <= n; ++m)
        for (int k = 0; k < m; ++k)
            c[static_cast<size_t>(m)] +=
                c[static_cast<size_t>(k)] * c[static_cast<size_t>(m - 1 - k)];
    return c[static_cast<size_t>(n)];
}

// visits every noncrossing partition of {1..n} exactly once (generation order,
// not sorted); each visited partition is already canonical
template <typename F>
void for_each_noncrossing(int n, F&& fn) {
    if (n < 1 || n > nc_max_n) throw std::invalid_argument("n out of range for enumeration");
    std::vector<std::vector<int>> blocks;
    std::vector<int> open;  // stack of open block indices, innermost on top
    auto rec = [&](auto&& self, int k) -> void {
        if (k > n) {
            fn(partition(n, blocks, typename partition::unchecked_tag{}));
            return;
        }
        blocks.push_back({k});
        open.push_back(static_cast<int>(blocks.size()) - 1);
        self(self, k + 1);
        open.pop_back();
        blocks.pop_back();
        // join an open block, which closes every block opened after it
        for (int s = static_cast<int>(open.size()) - 1; s >= 0; --s) {
            std::vector<int> closed(open.begin() + s + 1, open.end());
            open.resize(static_cast<size_t>(s) + 1);
            blocks[static_cast<size_t>(open[static_cast<size_t>(s)])].push_back(k);
            self(self, k + 1);
            blocks[static_cast<size_t>(open[static_cast<size_t>(s)])].pop_back();
            open.insert(open.end(), closed.begin(), closed.end());
        }
    };
    rec(rec, 1);
}

// all noncrossing partitions, sorted lexicographically by canonical form
inline std::vector<partition> enumerate_nc(int n) {
    std::vector<partition> out;
    for_each_noncrossing(n, [&](const partition& p) { out.push_back(p); });
    std::sort(out.begin(), out.end());
    return out;
}

// word over {a, a*}; 0 encodes a, 1 encodes a*
struct star_word {
    std::vector<uint8_t> sym;

    explicit star_word(std::vector<uint8_t> s) : sym(std::move(s)) {
        if (sym.empty()) throw std::invalid_argument("empty star word");
        for (auto v : sym)
            if (v > 1) throw std::invalid_argument("star word symbols must be 0 or 1");
    }

    // e.g. "aa*a" or "a*aa*"
    static star_word parse(const std::string& s) {
        std::vector<uint8_t> sym;
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == 'a') {
                if (i + 1 < s.size() && s[i + 1] == '*') { sym.push_back(1); ++i; }
                else sym.push_back(0);
            } else if (s[i] != ' ') {
                throw std::invalid_argument("bad star word: " + s);
            }
        }
        return star_word(std::move(sym));
    }

    int size() const { return static_cast<int>(sym.size()); }

    std::string str() const {
        std::string s;
        for (auto v : sym) s += (v == 0) ? "a" : "a*";
        return s;
    }
};

// interval partition whose blocks are the maximal runs with no repeated
// adjacent symbol; breaks exactly where sym[j] == sym[j+1]
inline partition max_alt_interval_partition(const star_word& e) {
    std::vector<std::vector<int>> blocks;
    std::vector<int> cur{1};
    for (int j = 1; j < e.size(); ++j) {
        if (e.sym[static_cast<size_t>(j)] == e.sym[static_cast<size_t>(j - 1)]) {
            blocks.push_back(cur);
            cur.clear();
        }
        cur.push_back(j + 1);
    }
    blocks.push_back(cur);
    return partition(e.size(), std::move(blocks));
}

// image under the cyclic shift 1 -> n, j -> j-1
inline partition rotate_partition(const partition& p) {
    std::vector<std::vector<int>> blocks;
    for (const auto& b : p.blocks()) {
        std::vector<int> nb;
        nb.reserve(b.size());
        for (int e : b) nb.push_back(e == 1 ? p.n() : e - 1);
        blocks.push_back(std::move(nb));
    }
    return partition(p.n(), std::move(blocks));
}

// image under the reflection j -> n+1-j
inline partition reflect_partition(const partition& p) {
    std::vector<std::vector<int>> blocks;
    for (const auto& b : p.blocks()) {
        std::vector<int> nb;
        nb.reserve(b.size());
        for (int e : b) nb.push_back(p.n() + 1 - e);
        blocks.push_back(std::move(nb));
    }
    return partition(p.n(), std::move(blocks));
}

// blocks that form contiguous intervals; nonempty for every noncrossing partition
inline std::vector<std::vector<int>> interval_blocks(const partition& p) {
    std::vector<std::vector<int>> out;
    for (const auto& b : p.blocks())
        if (b.back() - b.front() + 1 == static_cast<int>(b.size())) out.push_back(b);
    return out;
}

}  // namespace opval
