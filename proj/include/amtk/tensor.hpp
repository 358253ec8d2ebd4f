#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "amtk/corpus.hpp"
#include "amtk/util.hpp"

namespace amtk::tensor {

enum class Dtype { F64, F32, F16, BF16, I64, I32, I16, I8, U8, BOOL };

inline size_t dtype_size(Dtype d) {
    switch (d) {
        case Dtype::F64: case Dtype::I64: return 8;
        case Dtype::F32: case Dtype::I32: return 4;
        case Dtype::F16: case Dtype::BF16: case Dtype::I16: return 2;
        case Dtype::I8: case Dtype::U8: case Dtype::BOOL: return 1;
    }
    throw Error("dtype_size: invalid dtype");
}

inline std::string_view dtype_name(Dtype d) {
    switch (d) {
        case Dtype::F64: return "F64";
        case Dtype::F32: return "F32";
        case Dtype::F16: return "F16";
        case Dtype::BF16: return "BF16";
        case Dtype::I64: return "I64";
        case Dtype::I32: return "I32";
        case Dtype::I16: return "I16";
        case Dtype::I8: return "I8";
        case Dtype::U8: return "U8";
        case Dtype::BOOL: return "BOOL";
    }
    throw Error("dtype_name: invalid dtype");
}

inline Dtype dtype_from_name(std::string_view name) {
    for (Dtype d : {Dtype::F64, Dtype::F32, Dtype::F16, Dtype::BF16, Dtype::I64, Dtype::I32,
                    Dtype::I16, Dtype::I8, Dtype::U8, Dtype::BOOL})
        if (dtype_name(d) == name) return d;
    throw Error("unsupported dtype: " + std::string(name));
}

inline bool is_float_dtype(Dtype d) {
    return d == Dtype::F64 || d == Dtype::F32 || d == Dtype::F16 || d == Dtype::BF16;
}

// ---- half/bfloat16 bit conversions ----------------------------------------

inline float f16_to_f32(uint16_t h) {
    uint32_t sign = (uint32_t(h) & 0x8000u) << 16;
    uint32_t exp = (h >> 10) & 0x1f;
    uint32_t mant = h & 0x3ffu;
    uint32_t bits;
    if (exp == 0) {
        if (mant == 0) {
            bits = sign;
        } else {  // subnormal: renormalize
            int shift = 0;
            while (!(mant & 0x400u)) { mant <<= 1; ++shift; }
            mant &= 0x3ffu;
            bits = sign | ((127 - 15 - shift + 1) << 23) | (mant << 13);
        }
    } else if (exp == 0x1f) {
        bits = sign | 0x7f800000u | (mant << 13);
    } else {
        bits = sign | ((exp - 15 + 127) << 23) | (mant << 13);
    }
    float out;
    std::memcpy(&out, &bits, 4);
    return out;
}

inline uint16_t f32_to_f16(float f) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    uint16_t sign = static_cast<uint16_t>((bits >> 16) & 0x8000u);
    int32_t exp = static_cast<int32_t>((bits >> 23) & 0xff) - 127 + 15;
    uint32_t mant = bits & 0x7fffffu;
    if (((bits >> 23) & 0xff) == 0xff)  // inf/nan
        return static_cast<uint16_t>(sign | 0x7c00u | (mant ? 0x200u | (mant >> 13) : 0));
    if (exp >= 0x1f) return static_cast<uint16_t>(sign | 0x7c00u);  // overflow -> inf
    if (exp <= 0) {
        if (exp < -10) return sign;  // underflow -> zero
        // subnormal with round-to-nearest-even
        mant |= 0x800000u;
        uint32_t shift = static_cast<uint32_t>(14 - exp);
        uint32_t half = mant >> shift;
        uint32_t rem = mant & ((1u << shift) - 1);
        uint32_t halfway = 1u << (shift - 1);
        if (rem > halfway || (rem == halfway && (half & 1))) ++half;
        return static_cast<uint16_t>(sign | half);
    }
    uint32_t half = static_cast<uint32_t>(exp << 10) | (mant >> 13);
    uint32_t rem = mant & 0x1fffu;
    if (rem > 0x1000u || (rem == 0x1000u && (half & 1))) ++half;  // may carry into exp
    return static_cast<uint16_t>(sign | half);
}

inline float bf16_to_f32(uint16_t b) {
    uint32_t bits = uint32_t(b) << 16;
    float out;
    std::memcpy(&out, &bits, 4);
    return out;
}

inline uint16_t f32_to_bf16(float f) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    if ((bits & 0x7f800000u) == 0x7f800000u && (bits & 0x7fffffu))
        return static_cast<uint16_t>((bits >> 16) | 0x40u);  // quiet the NaN
    uint32_t lsb = (bits >> 16) & 1;
    uint32_t rounded = bits + 0x7fffu + lsb;  // round to nearest even
    return static_cast<uint16_t>(rounded >> 16);
}

// ---- Tensor / TensorMap ----------------------------------------------------

struct Tensor {
    Dtype dtype = Dtype::F32;
    std::vector<int64_t> shape;
    std::vector<uint8_t> data;

    int64_t numel() const {
        int64_t n = 1;
        for (int64_t s : shape) n *= s;
        return n;
    }
    bool operator==(const Tensor&) const = default;
};

struct TensorMap {
    std::map<std::string, Tensor> tensors;
    std::map<std::string, std::string> metadata;

    bool operator==(const TensorMap&) const = default;
};

inline Tensor make_tensor(Dtype dtype, std::vector<int64_t> shape) {
    Tensor t;
    t.dtype = dtype;
    t.shape = std::move(shape);
    t.data.resize(static_cast<size_t>(t.numel()) * dtype_size(dtype));
    return t;
}

// Reads a float tensor into doubles.
inline std::vector<double> to_doubles(const Tensor& t) {
    if (!is_float_dtype(t.dtype))
        throw Error("to_doubles: non-float dtype " + std::string(dtype_name(t.dtype)));
    size_t n = static_cast<size_t>(t.numel());
    std::vector<double> out(n);
    switch (t.dtype) {
        case Dtype::F64: {
            std::memcpy(out.data(), t.data.data(), n * 8);
            break;
        }
        case Dtype::F32: {
            const float* p = reinterpret_cast<const float*>(t.data.data());
            for (size_t i = 0; i < n; ++i) out[i] = p[i];
            break;
        }
        case Dtype::F16: {
            const uint16_t* p = reinterpret_cast<const uint16_t*>(t.data.data());
            for (size_t i = 0; i < n; ++i) out[i] = f16_to_f32(p[i]);
            break;
        }
        case Dtype::BF16: {
            const uint16_t* p = reinterpret_cast<const uint16_t*>(t.data.data());
            for (size_t i = 0; i < n; ++i) out[i] = bf16_to_f32(p[i]);
            break;
        }
        default: break;
    }
    return out;
}

inline Tensor from_doubles(const std::vector<double>& values, Dtype dtype,
                           const std::vector<int64_t>& shape) {
    Tensor t = make_tensor(dtype, shape);
    if (static_cast<size_t>(t.numel()) != values.size())
        throw Error("from_doubles: element count does not match shape");
    switch (dtype) {
        case Dtype::F64:
            std::memcpy(t.data.data(), values.data(), values.size() * 8);
            break;
        case Dtype::F32: {
            float* p = reinterpret_cast<float*>(t.data.data());
            for (size_t i = 0; i < values.size(); ++i) p[i] = static_cast<float>(values[i]);
            break;
        }
        case Dtype::F16: {
            uint16_t* p = reinterpret_cast<uint16_t*>(t.data.data());
            for (size_t i = 0; i < values.size(); ++i)
                p[i] = f32_to_f16(static_cast<float>(values[i]));
            break;
        }
        case Dtype::BF16: {
            uint16_t* p = reinterpret_cast<uint16_t*>(t.data.data());
            for (size_t i = 0; i < values.size(); ++i)
                p[i] = f32_to_bf16(static_cast<float>(values[i]));
            break;
        }
        default:
            throw Error("from_doubles: non-float dtype");
    }
    return t;
}

// ---- Safetensors container ---------------------------------------------
// Layout: u64 little-endian header length, JSON header mapping tensor name to
// {dtype, shape, data_offsets}, then one contiguous byte buffer. Offsets are
// relative to the start of the buffer. Saving writes tensors in sorted name
// order and pads the header to an 8-byte boundary, so identical maps produce
// identical files.

inline void save_file(const TensorMap& map, const std::string& path) {
    Json header = Json::object();
    if (!map.metadata.empty()) header["__metadata__"] = map.metadata;
    uint64_t offset = 0;
    for (const auto& [name, t] : map.tensors) {
        uint64_t end = offset + t.data.size();
        header[name] = {{"dtype", std::string(dtype_name(t.dtype))},
                        {"shape", t.shape},
                        {"data_offsets", {offset, end}}};
        offset = end;
    }
    std::string header_text = header.dump();
    while ((8 + header_text.size()) % 8 != 0) header_text.push_back(' ');

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    uint64_t len = header_text.size();
    uint8_t len_le[8];
    for (int i = 0; i < 8; ++i) len_le[i] = static_cast<uint8_t>(len >> (8 * i));
    out.write(reinterpret_cast<const char*>(len_le), 8);
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    for (const auto& [name, t] : map.tensors)
        out.write(reinterpret_cast<const char*>(t.data.data()),
                  static_cast<std::streamsize>(t.data.size()));
    if (!out) throw Error("write failed: " + path);
}

inline TensorMap load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    uint8_t len_le[8];
    if (!in.read(reinterpret_cast<char*>(len_le), 8))
        throw Error(path + ": truncated header length");
    uint64_t len = 0;
    for (int i = 0; i < 8; ++i) len |= uint64_t(len_le[i]) << (8 * i);
    if (len == 0 || len > (1ull << 31)) throw Error(path + ": implausible header length");
    std::string header_text(len, '\0');
    if (!in.read(header_text.data(), static_cast<std::streamsize>(len)))
        throw Error(path + ": truncated header");
    Json header = Json::parse(header_text, nullptr, false);
    if (header.is_discarded() || !header.is_object())
        throw Error(path + ": malformed header JSON");

    std::vector<uint8_t> buffer((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
    TensorMap map;
    uint64_t spanned = 0;
    for (const auto& [name, entry] : header.items()) {
        if (name == "__metadata__") {
            map.metadata = entry.get<std::map<std::string, std::string>>();
            continue;
        }
        Tensor t;
        t.dtype = dtype_from_name(entry.at("dtype").get<std::string>());
        t.shape = entry.at("shape").get<std::vector<int64_t>>();
        auto offsets = entry.at("data_offsets").get<std::vector<uint64_t>>();
        if (offsets.size() != 2 || offsets[1] < offsets[0])
            throw Error(path + ": bad data_offsets for tensor '" + name + "'");
        uint64_t want = static_cast<uint64_t>(t.numel()) * dtype_size(t.dtype);
        if (offsets[1] - offsets[0] != want)
            throw Error(path + ": byte length mismatch for tensor '" + name + "' (header says " +
                        std::to_string(offsets[1] - offsets[0]) + ", shape needs " +
                        std::to_string(want) + ")");
        if (offsets[1] > buffer.size())
            throw Error(path + ": truncated buffer for tensor '" + name + "'");
        t.data.assign(buffer.begin() + static_cast<ptrdiff_t>(offsets[0]),
                      buffer.begin() + static_cast<ptrdiff_t>(offsets[1]));
        spanned += want;
        map.tensors.emplace(name, std::move(t));
    }
    if (spanned != buffer.size())
        throw Error(path + ": buffer size " + std::to_string(buffer.size()) +
                    " does not match tensors' total " + std::to_string(spanned));
    return map;
}

}  // namespace amtk::tensor
