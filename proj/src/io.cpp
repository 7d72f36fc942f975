#include "tenkrylov/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace tenkrylov {

TensorFormat parse_format(const std::string& name) {
    if (name == "dense") return TensorFormat::dense;
    if (name == "coo") return TensorFormat::coo;
    if (name == "canonical") return TensorFormat::canonical;
    if (name == "tucker") return TensorFormat::tucker;
    throw std::invalid_argument("unknown tensor format: " + name);
}

const char* to_string(TensorFormat f) {
    switch (f) {
        case TensorFormat::dense: return "dense";
        case TensorFormat::coo: return "coo";
        case TensorFormat::canonical: return "canonical";
        default: return "tucker";
    }
}

namespace {

constexpr char kMagic[4] = {'T', 'K', 'V', '1'};

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

// Whitespace tokenizer that remembers the line of each token for diagnostics.
class TextReader {
public:
    explicit TextReader(const std::string& path) : path_(path), in_(path) {
        if (!in_) throw std::runtime_error(path + ": cannot open file");
    }

    double next_double(const char* what) {
        const auto [tok, line] = next_token(what);
        try {
            size_t pos = 0;
            const double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            fail(path_, line, std::string("expected number for ") + what + ", got '" + tok + "'");
        }
    }

    long long next_int(const char* what) {
        const auto [tok, line] = next_token(what);
        try {
            size_t pos = 0;
            const long long v = std::stoll(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            fail(path_, line, std::string("expected integer for ") + what + ", got '" + tok + "'");
        }
    }

    // Number of whitespace-separated tokens on the first non-empty line.
    int first_line_token_count() {
        std::string line;
        int line_no = 0;
        const auto pos = in_.tellg();
        while (std::getline(in_, line)) {
            ++line_no;
            std::istringstream ss(line);
            std::string tok;
            int count = 0;
            while (ss >> tok) ++count;
            if (count > 0) {
                in_.clear();
                in_.seekg(pos);
                return count;
            }
        }
        fail(path_, line_no, "empty file");
    }

    int line() const { return line_no_; }
    const std::string& path() const { return path_; }

private:
    std::pair<std::string, int> next_token(const char* what) {
        while (true) {
            if (pos_ >= current_.size()) {
                if (!std::getline(in_, current_)) fail(path_, line_no_, std::string("unexpected end of file while reading ") + what);
                ++line_no_;
                pos_ = 0;
                continue;
            }
            while (pos_ < current_.size() && std::isspace(static_cast<unsigned char>(current_[pos_]))) ++pos_;
            if (pos_ >= current_.size()) continue;
            const size_t start = pos_;
            while (pos_ < current_.size() && !std::isspace(static_cast<unsigned char>(current_[pos_]))) ++pos_;
            return {current_.substr(start, pos_ - start), line_no_};
        }
    }

    std::string path_;
    std::ifstream in_;
    std::string current_;
    size_t pos_ = 0;
    int line_no_ = 0;
};

bool has_magic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    char buf[4] = {};
    in.read(buf, 4);
    return in.gcount() == 4 && std::memcmp(buf, kMagic, 4) == 0;
}

// --- binary helpers (x86-64 native order is little-endian) ---

class BinWriter {
public:
    BinWriter(const std::string& path, std::uint32_t tag) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error(path + ": cannot open file for writing");
        out_.write(kMagic, 4);
        write_u64(tag);
    }
    void write_u64(std::uint64_t v) { out_.write(reinterpret_cast<const char*>(&v), 8); }
    void write_f64(const double* v, size_t n) {
        out_.write(reinterpret_cast<const char*>(v), static_cast<std::streamsize>(8 * n));
    }

private:
    std::ofstream out_;
};

class BinReader {
public:
    explicit BinReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error(path + ": cannot open file");
        char buf[4];
        in_.read(buf, 4);
        if (in_.gcount() != 4 || std::memcmp(buf, kMagic, 4) != 0)
            throw std::runtime_error(path + ": not a TKV1 binary file");
        tag_ = static_cast<std::uint32_t>(read_u64());
    }
    std::uint32_t tag() const { return tag_; }
    std::uint64_t read_u64() {
        std::uint64_t v = 0;
        in_.read(reinterpret_cast<char*>(&v), 8);
        if (in_.gcount() != 8) throw std::runtime_error(path_ + ": truncated binary file");
        return v;
    }
    void read_f64(double* v, size_t n) {
        in_.read(reinterpret_cast<char*>(v), static_cast<std::streamsize>(8 * n));
        if (in_.gcount() != static_cast<std::streamsize>(8 * n))
            throw std::runtime_error(path_ + ": truncated binary file");
    }

private:
    std::string path_;
    std::ifstream in_;
    std::uint32_t tag_ = 0;
};

constexpr std::uint32_t kTagDense = 0, kTagCoo = 1, kTagCanonical = 2, kTagTucker = 3;

void check_tag(const BinReader& r, std::uint32_t want, const std::string& path) {
    if (r.tag() != want)
        throw std::runtime_error(path + ": binary format tag does not match requested format");
}

void write_value(std::FILE* f, double v) { std::fprintf(f, "%.17g", v); }

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_for_write(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "w"));
    if (!f) throw std::runtime_error(path + ": cannot open file for writing");
    return f;
}

Index checked_dim(long long v, const char* what, const std::string& path, int line) {
    if (v < 1 || v > (1LL << 40)) fail(path, line, std::string("invalid ") + what);
    return static_cast<Index>(v);
}

Matrix read_factor(TextReader& r, Index rows, Index cols, const char* what) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = r.next_double(what);
    return m;
}

}  // namespace

DenseTensor3 load_dense(const std::string& path) {
    if (has_magic(path)) {
        BinReader r(path);
        check_tag(r, kTagDense, path);
        const Index n1 = static_cast<Index>(r.read_u64());
        const Index n2 = static_cast<Index>(r.read_u64());
        const Index n3 = static_cast<Index>(r.read_u64());
        std::vector<double> vals(static_cast<size_t>(n1 * n2 * n3));
        r.read_f64(vals.data(), vals.size());
        return DenseTensor3({n1, n2, n3}, std::move(vals));
    }
    TextReader r(path);
    const Index n1 = checked_dim(r.next_int("n1"), "n1", path, r.line());
    const Index n2 = checked_dim(r.next_int("n2"), "n2", path, r.line());
    const Index n3 = checked_dim(r.next_int("n3"), "n3", path, r.line());
    std::vector<double> vals(static_cast<size_t>(n1 * n2 * n3));
    for (auto& v : vals) v = r.next_double("tensor entry");
    return DenseTensor3({n1, n2, n3}, std::move(vals));
}

SparseTensor3 load_coo(const std::string& path) {
    if (has_magic(path)) {
        BinReader r(path);
        check_tag(r, kTagCoo, path);
        const Index n1 = static_cast<Index>(r.read_u64());
        const Index n2 = static_cast<Index>(r.read_u64());
        const Index n3 = static_cast<Index>(r.read_u64());
        const auto nnz = r.read_u64();
        std::vector<SparseTensor3::Entry> entries(nnz);
        for (auto& e : entries) {
            e.i = static_cast<Index>(r.read_u64());
            e.j = static_cast<Index>(r.read_u64());
            e.k = static_cast<Index>(r.read_u64());
            r.read_f64(&e.value, 1);
        }
        return SparseTensor3({n1, n2, n3}, std::move(entries));
    }
    TextReader r(path);
    const int header_tokens = r.first_line_token_count();
    if (header_tokens != 4 && header_tokens != 5)
        fail(path, 1, "coo header must be 'n1 n2 n3 nnz' or 'n1 n2 m1 m2 nnz'");
    const bool folded = header_tokens == 5;
    const Index n1 = checked_dim(r.next_int("n1"), "n1", path, r.line());
    const Index n2 = checked_dim(r.next_int("n2"), "n2", path, r.line());
    Index n3, m1 = 0;
    if (folded) {
        m1 = checked_dim(r.next_int("m1"), "m1", path, r.line());
        const Index m2 = checked_dim(r.next_int("m2"), "m2", path, r.line());
        n3 = m1 * m2;  // multi-index (p, q) -> p + m1*q, p fastest
    } else {
        n3 = checked_dim(r.next_int("n3"), "n3", path, r.line());
    }
    const long long nnz = r.next_int("nnz");
    if (nnz < 0) fail(path, r.line(), "negative nnz");
    std::vector<SparseTensor3::Entry> entries;
    entries.reserve(static_cast<size_t>(nnz));
    for (long long e = 0; e < nnz; ++e) {
        SparseTensor3::Entry ent{};
        ent.i = static_cast<Index>(r.next_int("entry index i"));
        ent.j = static_cast<Index>(r.next_int("entry index j"));
        if (folded) {
            const Index p = static_cast<Index>(r.next_int("entry index p"));
            const Index q = static_cast<Index>(r.next_int("entry index q"));
            ent.k = p + m1 * q;
        } else {
            ent.k = static_cast<Index>(r.next_int("entry index k"));
        }
        ent.value = r.next_double("entry value");
        if (ent.i < 0 || ent.i >= n1 || ent.j < 0 || ent.j >= n2 || ent.k < 0 || ent.k >= n3)
            fail(path, r.line(), "entry index out of range");
        entries.push_back(ent);
    }
    return SparseTensor3({n1, n2, n3}, std::move(entries));
}

CanonicalTensor load_canonical(const std::string& path) {
    if (has_magic(path)) {
        BinReader r(path);
        check_tag(r, kTagCanonical, path);
        const Index n1 = static_cast<Index>(r.read_u64());
        const Index n2 = static_cast<Index>(r.read_u64());
        const Index n3 = static_cast<Index>(r.read_u64());
        const Index rank = static_cast<Index>(r.read_u64());
        CanonicalTensor t;
        const Index dims[3] = {n1, n2, n3};
        for (int l = 0; l < 3; ++l) {
            t.factors[static_cast<size_t>(l)].resize(dims[l], rank);
            r.read_f64(t.factors[static_cast<size_t>(l)].data(),
                       static_cast<size_t>(dims[l] * rank));
        }
        return t;
    }
    TextReader r(path);
    const Index n1 = checked_dim(r.next_int("n1"), "n1", path, r.line());
    const Index n2 = checked_dim(r.next_int("n2"), "n2", path, r.line());
    const Index n3 = checked_dim(r.next_int("n3"), "n3", path, r.line());
    const long long rank = r.next_int("rank");
    if (rank < 0) fail(path, r.line(), "negative canonical rank");
    CanonicalTensor t;
    t.factors[0] = read_factor(r, n1, rank, "factor U entry");
    t.factors[1] = read_factor(r, n2, rank, "factor V entry");
    t.factors[2] = read_factor(r, n3, rank, "factor W entry");
    return t;
}

TuckerTensor load_tucker(const std::string& path) {
    if (has_magic(path)) {
        BinReader r(path);
        check_tag(r, kTagTucker, path);
        Index n[3], rk[3];
        for (auto& v : n) v = static_cast<Index>(r.read_u64());
        for (auto& v : rk) v = static_cast<Index>(r.read_u64());
        TuckerTensor t;
        std::vector<double> core(static_cast<size_t>(rk[0] * rk[1] * rk[2]));
        r.read_f64(core.data(), core.size());
        t.core = DenseTensor3({rk[0], rk[1], rk[2]}, std::move(core));
        for (int l = 0; l < 3; ++l) {
            t.factors[static_cast<size_t>(l)].resize(n[l], rk[l]);
            r.read_f64(t.factors[static_cast<size_t>(l)].data(),
                       static_cast<size_t>(n[l] * rk[l]));
        }
        t.validate();
        return t;
    }
    TextReader r(path);
    Index n[3], rk[3];
    n[0] = checked_dim(r.next_int("n1"), "n1", path, r.line());
    n[1] = checked_dim(r.next_int("n2"), "n2", path, r.line());
    n[2] = checked_dim(r.next_int("n3"), "n3", path, r.line());
    for (int l = 0; l < 3; ++l) {
        rk[l] = checked_dim(r.next_int("rank"), "rank", path, r.line());
        if (rk[l] > n[l]) fail(path, r.line(), "rank exceeds mode size");
    }
    TuckerTensor t;
    std::vector<double> core(static_cast<size_t>(rk[0] * rk[1] * rk[2]));
    for (auto& v : core) v = r.next_double("core entry");
    t.core = DenseTensor3({rk[0], rk[1], rk[2]}, std::move(core));
    for (int l = 0; l < 3; ++l)
        t.factors[static_cast<size_t>(l)] = read_factor(r, n[l], rk[l], "factor entry");
    t.validate();
    return t;
}

std::unique_ptr<TenvecSource> load_tensor(const std::string& path, TensorFormat format) {
    switch (format) {
        case TensorFormat::dense: return std::make_unique<DenseSource>(load_dense(path));
        case TensorFormat::coo: return std::make_unique<SparseSource>(load_coo(path));
        case TensorFormat::canonical:
            return std::make_unique<CanonicalSource>(load_canonical(path));
        default: return std::make_unique<TuckerSource>(load_tucker(path));
    }
}

void save_dense(const std::string& path, const DenseTensor3& t, bool binary) {
    if (binary) {
        BinWriter w(path, kTagDense);
        w.write_u64(static_cast<std::uint64_t>(t.n1()));
        w.write_u64(static_cast<std::uint64_t>(t.n2()));
        w.write_u64(static_cast<std::uint64_t>(t.n3()));
        w.write_f64(t.data(), static_cast<size_t>(t.size()));
        return;
    }
    auto f = open_for_write(path);
    std::fprintf(f.get(), "%" PRId64 " %" PRId64 " %" PRId64 "\n",
                 static_cast<std::int64_t>(t.n1()), static_cast<std::int64_t>(t.n2()),
                 static_cast<std::int64_t>(t.n3()));
    for (Index i = 0; i < t.size(); ++i) {
        write_value(f.get(), t.data()[i]);
        std::fputc((i + 1) % 8 == 0 || i + 1 == t.size() ? '\n' : ' ', f.get());
    }
}

void save_coo(const std::string& path, const SparseTensor3& t, bool binary) {
    const Shape3 s = t.shape();
    if (binary) {
        BinWriter w(path, kTagCoo);
        w.write_u64(static_cast<std::uint64_t>(s.n1));
        w.write_u64(static_cast<std::uint64_t>(s.n2));
        w.write_u64(static_cast<std::uint64_t>(s.n3));
        w.write_u64(static_cast<std::uint64_t>(t.nnz()));
        for (const auto& e : t.entries()) {
            w.write_u64(static_cast<std::uint64_t>(e.i));
            w.write_u64(static_cast<std::uint64_t>(e.j));
            w.write_u64(static_cast<std::uint64_t>(e.k));
            w.write_f64(&e.value, 1);
        }
        return;
    }
    auto f = open_for_write(path);
    std::fprintf(f.get(), "%" PRId64 " %" PRId64 " %" PRId64 " %" PRId64 "\n",
                 static_cast<std::int64_t>(s.n1), static_cast<std::int64_t>(s.n2),
                 static_cast<std::int64_t>(s.n3), static_cast<std::int64_t>(t.nnz()));
    for (const auto& e : t.entries()) {
        std::fprintf(f.get(), "%" PRId64 " %" PRId64 " %" PRId64 " ",
                     static_cast<std::int64_t>(e.i), static_cast<std::int64_t>(e.j),
                     static_cast<std::int64_t>(e.k));
        write_value(f.get(), e.value);
        std::fputc('\n', f.get());
    }
}

namespace {

void write_factor(std::FILE* f, const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            write_value(f, m(i, j));
            std::fputc(j + 1 == m.cols() ? '\n' : ' ', f);
        }
    }
}

}  // namespace

void save_canonical(const std::string& path, const CanonicalTensor& t, bool binary) {
    const Shape3 s = t.ambient_shape();
    if (binary) {
        BinWriter w(path, kTagCanonical);
        w.write_u64(static_cast<std::uint64_t>(s.n1));
        w.write_u64(static_cast<std::uint64_t>(s.n2));
        w.write_u64(static_cast<std::uint64_t>(s.n3));
        w.write_u64(static_cast<std::uint64_t>(t.rank()));
        for (const auto& fm : t.factors)
            w.write_f64(fm.data(), static_cast<size_t>(fm.size()));
        return;
    }
    auto f = open_for_write(path);
    std::fprintf(f.get(), "%" PRId64 " %" PRId64 " %" PRId64 " %" PRId64 "\n",
                 static_cast<std::int64_t>(s.n1), static_cast<std::int64_t>(s.n2),
                 static_cast<std::int64_t>(s.n3), static_cast<std::int64_t>(t.rank()));
    for (const auto& fm : t.factors) write_factor(f.get(), fm);
}

void save_tucker(const std::string& path, const TuckerTensor& t, bool binary) {
    const Shape3 s = t.ambient_shape();
    const auto rk = t.ranks();
    if (binary) {
        BinWriter w(path, kTagTucker);
        w.write_u64(static_cast<std::uint64_t>(s.n1));
        w.write_u64(static_cast<std::uint64_t>(s.n2));
        w.write_u64(static_cast<std::uint64_t>(s.n3));
        for (auto r : rk) w.write_u64(static_cast<std::uint64_t>(r));
        w.write_f64(t.core.data(), static_cast<size_t>(t.core.size()));
        for (const auto& fm : t.factors)
            w.write_f64(fm.data(), static_cast<size_t>(fm.size()));
        return;
    }
    auto f = open_for_write(path);
    std::fprintf(f.get(),
                 "%" PRId64 " %" PRId64 " %" PRId64 " %" PRId64 " %" PRId64 " %" PRId64 "\n",
                 static_cast<std::int64_t>(s.n1), static_cast<std::int64_t>(s.n2),
                 static_cast<std::int64_t>(s.n3), static_cast<std::int64_t>(rk[0]),
                 static_cast<std::int64_t>(rk[1]), static_cast<std::int64_t>(rk[2]));
    for (Index i = 0; i < t.core.size(); ++i) {
        write_value(f.get(), t.core.data()[i]);
        std::fputc((i + 1) % 8 == 0 || i + 1 == t.core.size() ? '\n' : ' ', f.get());
    }
    for (const auto& fm : t.factors) write_factor(f.get(), fm);
}

}  // namespace tenkrylov
