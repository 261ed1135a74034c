#include "checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "error.hpp"

namespace mgcn {

namespace {

constexpr char kMagic[8] = {'M', 'G', 'C', 'N', 'C', 'K', 'P', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 8);
}

std::uint64_t get_u64(std::istream& in, const std::string& path) {
    char buf[8];
    if (!in.read(buf, 8)) throw IoError("truncated checkpoint: " + path);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
}

void put_doubles(std::ostream& out, const double* p, std::size_t n) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void get_doubles(std::istream& in, double* p, std::size_t n, const std::string& path) {
    if (!in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double))))
        throw IoError("truncated checkpoint: " + path);
}

void put_matrix(std::ostream& out, const Matrix& m) {
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    put_doubles(out, m.data(), m.size());
}

Matrix get_matrix(std::istream& in, const std::string& path) {
    const auto rows = static_cast<int>(get_u64(in, path));
    const auto cols = static_cast<int>(get_u64(in, path));
    if (rows < 0 || cols < 0) throw IoError("corrupt tensor shape in checkpoint: " + path);
    Matrix m(rows, cols);
    get_doubles(in, m.data(), m.size(), path);
    return m;
}

void put_string(std::ostream& out, const std::string& s) {
    put_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in, const std::string& path) {
    const auto n = get_u64(in, path);
    std::string s(n, '\0');
    if (n && !in.read(s.data(), static_cast<std::streamsize>(n)))
        throw IoError("truncated checkpoint: " + path);
    return s;
}

}  // namespace

void write_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    put_string(out, ckpt.config_json);

    put_u64(out, ckpt.feature_mean.size());
    if (!ckpt.feature_mean.empty()) {
        if (ckpt.feature_std.size() != ckpt.feature_mean.size())
            throw ShapeError("standardizer mean/std sizes differ");
        put_doubles(out, ckpt.feature_mean.data(), ckpt.feature_mean.size());
        put_doubles(out, ckpt.feature_std.data(), ckpt.feature_std.size());
    }

    put_u64(out, ckpt.tensors.size());
    for (const auto& [name, m] : ckpt.tensors) {
        put_string(out, name);
        put_matrix(out, m);
    }

    out.put(ckpt.has_adam ? 1 : 0);
    if (ckpt.has_adam) {
        if (ckpt.adam_m.size() != ckpt.tensors.size() ||
            ckpt.adam_v.size() != ckpt.tensors.size())
            throw ShapeError("optimizer moment count does not match tensor count");
        put_u64(out, static_cast<std::uint64_t>(ckpt.adam_step));
        for (const auto& m : ckpt.adam_m) put_matrix(out, m);
        for (const auto& v : ckpt.adam_v) put_matrix(out, v);
    }
    if (!out) throw IoError("write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw IoError("not a checkpoint file (bad magic): " + path);

    Checkpoint ckpt;
    ckpt.config_json = get_string(in, path);

    const auto std_len = get_u64(in, path);
    if (std_len) {
        ckpt.feature_mean.resize(std_len);
        ckpt.feature_std.resize(std_len);
        get_doubles(in, ckpt.feature_mean.data(), std_len, path);
        get_doubles(in, ckpt.feature_std.data(), std_len, path);
    }

    const auto tensor_count = get_u64(in, path);
    ckpt.tensors.reserve(tensor_count);
    for (std::uint64_t i = 0; i < tensor_count; ++i) {
        std::string name = get_string(in, path);
        ckpt.tensors.emplace_back(std::move(name), get_matrix(in, path));
    }

    int has_adam = in.get();
    if (has_adam == 1) {
        ckpt.has_adam = true;
        ckpt.adam_step = static_cast<long long>(get_u64(in, path));
        ckpt.adam_m.reserve(tensor_count);
        ckpt.adam_v.reserve(tensor_count);
        for (std::uint64_t i = 0; i < tensor_count; ++i) ckpt.adam_m.push_back(get_matrix(in, path));
        for (std::uint64_t i = 0; i < tensor_count; ++i) ckpt.adam_v.push_back(get_matrix(in, path));
    } else if (has_adam != 0) {
        throw IoError("corrupt checkpoint trailer: " + path);
    }
    return ckpt;
}

}  // namespace mgcn
