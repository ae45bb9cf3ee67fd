#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dse/errors.hpp"

// Reader/writer for the npy binary format, versions 1.0 and 2.0.
// Only C-order little-endian float32/float64 arrays are supported;
// float32 payloads are widened to float64 on load.

namespace dse::npy {

enum class Dtype { f4, f8 };

struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> data;  // C-order, widened to double
  Dtype stored_dtype = Dtype::f8;

  std::size_t size() const {
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    return n;
  }
};

namespace detail {

inline const char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

inline std::uint64_t read_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline void skip_spaces(const std::string& s, std::size_t& pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n')) ++pos;
}

inline bool consume(const std::string& s, std::size_t& pos, char c) {
  skip_spaces(s, pos);
  if (pos < s.size() && s[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

inline std::string parse_quoted(const std::string& s, std::size_t& pos) {
  skip_spaces(s, pos);
  if (pos >= s.size() || (s[pos] != '\'' && s[pos] != '"'))
    throw FormatError("npy header: expected quoted string");
  const char quote = s[pos++];
  std::string out;
  while (pos < s.size() && s[pos] != quote) out.push_back(s[pos++]);
  if (pos >= s.size()) throw FormatError("npy header: unterminated string");
  ++pos;
  return out;
}

struct Header {
  std::string descr;
  bool fortran_order = false;
  std::vector<std::size_t> shape;
};

// The header is a Python dict literal with exactly the keys 'descr',
// 'fortran_order' and 'shape', in any order, optionally space-padded.
inline Header parse_header(const std::string& text) {
  Header h;
  bool saw_descr = false, saw_order = false, saw_shape = false;
  std::size_t pos = 0;
  if (!consume(text, pos, '{')) throw FormatError("npy header: expected '{'");
  while (true) {
    skip_spaces(text, pos);
    if (pos < text.size() && text[pos] == '}') {
      ++pos;
      break;
    }
    const std::string key = parse_quoted(text, pos);
    if (!consume(text, pos, ':')) throw FormatError("npy header: expected ':'");
    if (key == "descr") {
      h.descr = parse_quoted(text, pos);
      saw_descr = true;
    } else if (key == "fortran_order") {
      skip_spaces(text, pos);
      if (text.compare(pos, 4, "True") == 0) {
        h.fortran_order = true;
        pos += 4;
      } else if (text.compare(pos, 5, "False") == 0) {
        h.fortran_order = false;
        pos += 5;
      } else {
        throw FormatError("npy header: fortran_order must be True or False");
      }
      saw_order = true;
    } else if (key == "shape") {
      if (!consume(text, pos, '(')) throw FormatError("npy header: expected '('");
      while (true) {
        skip_spaces(text, pos);
        if (pos < text.size() && text[pos] == ')') {
          ++pos;
          break;
        }
        std::size_t value = 0;
        bool any = false;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
          value = value * 10 + static_cast<std::size_t>(text[pos] - '0');
          ++pos;
          any = true;
        }
        if (!any) throw FormatError("npy header: bad shape entry");
        h.shape.push_back(value);
        skip_spaces(text, pos);
        if (pos < text.size() && text[pos] == ',') ++pos;
      }
      saw_shape = true;
    } else {
      throw FormatError("npy header: unknown key '" + key + "'");
    }
    skip_spaces(text, pos);
    if (pos < text.size() && text[pos] == ',') ++pos;
  }
  if (!saw_descr || !saw_order || !saw_shape)
    throw FormatError("npy header: missing required key");
  return h;
}

inline double decode_f4(const unsigned char* p) {
  const auto bits = static_cast<std::uint32_t>(read_le(p, 4));
  return static_cast<double>(std::bit_cast<float>(bits));
}

inline double decode_f8(const unsigned char* p) {
  return std::bit_cast<double>(read_le(p, 8));
}

}  // namespace detail

inline Array load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");

  if (raw.size() < 10 || std::memcmp(raw.data(), detail::kMagic, 6) != 0)
    throw FormatError("'" + path.string() + "' is not an npy file");
  const unsigned major = raw[6];
  std::size_t header_len = 0, header_off = 0;
  if (major == 1) {
    header_len = detail::read_le(raw.data() + 8, 2);
    header_off = 10;
  } else if (major == 2) {
    if (raw.size() < 12) throw FormatError("truncated npy v2 prelude");
    header_len = detail::read_le(raw.data() + 8, 4);
    header_off = 12;
  } else {
    throw FormatError("unsupported npy version " + std::to_string(major));
  }
  if (raw.size() < header_off + header_len) throw FormatError("truncated npy header");
  const std::string header_text(reinterpret_cast<const char*>(raw.data() + header_off),
                                header_len);
  const detail::Header header = detail::parse_header(header_text);

  if (header.fortran_order)
    throw FormatError("Fortran-order arrays are not supported");
  Dtype dtype;
  if (header.descr == "<f4") {
    dtype = Dtype::f4;
  } else if (header.descr == "<f8") {
    dtype = Dtype::f8;
  } else {
    throw FormatError("unsupported dtype '" + header.descr +
                      "' (expected '<f4' or '<f8')");
  }

  Array array;
  array.shape = header.shape;
  array.stored_dtype = dtype;
  const std::size_t count = array.size();
  const std::size_t item = dtype == Dtype::f4 ? 4 : 8;
  const std::size_t data_off = header_off + header_len;
  if (raw.size() != data_off + count * item)
    throw FormatError("npy payload size does not match shape");

  array.data.resize(count);
  const unsigned char* p = raw.data() + data_off;
  if (dtype == Dtype::f4) {
    for (std::size_t i = 0; i < count; ++i) array.data[i] = detail::decode_f4(p + 4 * i);
  } else {
    for (std::size_t i = 0; i < count; ++i) array.data[i] = detail::decode_f8(p + 8 * i);
  }
  return array;
}

inline void save(const std::filesystem::path& path, const std::vector<std::size_t>& shape,
                 const double* data, Dtype dtype = Dtype::f8) {
  std::string dict = "{'descr': '";
  dict += dtype == Dtype::f4 ? "<f4" : "<f8";
  dict += "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dict += std::to_string(shape[i]);
    if (shape.size() == 1)
      dict += ",";
    else if (i + 1 < shape.size())
      dict += ", ";
  }
  dict += "), }";
  // Pad with spaces so the full prelude is a multiple of 64 bytes and the
  // header ends with a newline, matching what numpy itself writes.
  std::size_t total = 10 + dict.size() + 1;
  const std::size_t padded = (total + 63) / 64 * 64;
  dict.append(padded - total, ' ');
  dict.push_back('\n');

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create '" + path.string() + "'");
  out.write(detail::kMagic, 6);
  const unsigned char version[2] = {1, 0};
  out.write(reinterpret_cast<const char*>(version), 2);
  const std::size_t hlen = dict.size();
  const unsigned char len_le[2] = {static_cast<unsigned char>(hlen & 0xff),
                                   static_cast<unsigned char>((hlen >> 8) & 0xff)};
  out.write(reinterpret_cast<const char*>(len_le), 2);
  out.write(dict.data(), static_cast<std::streamsize>(dict.size()));

  std::size_t count = 1;
  for (std::size_t s : shape) count *= s;
  if (dtype == Dtype::f8) {
    for (std::size_t i = 0; i < count; ++i) {
      const auto bits = std::bit_cast<std::uint64_t>(data[i]);
      unsigned char buf[8];
      for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
      out.write(reinterpret_cast<const char*>(buf), 8);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(data[i]));
      unsigned char buf[4];
      for (int b = 0; b < 4; ++b) buf[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
      out.write(reinterpret_cast<const char*>(buf), 4);
    }
  }
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

}  // namespace dse::npy
