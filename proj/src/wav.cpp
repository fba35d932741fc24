#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "tfz/signal_bank.hpp"

namespace tfz {
namespace {

std::uint32_t rd_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t rd_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::vector<unsigned char>& b, std::uint32_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
  b.push_back((v >> 16) & 0xff);
  b.push_back((v >> 24) & 0xff);
}

void wr_u16(std::vector<unsigned char>& b, std::uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
}

}  // namespace

Signal load_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("load_wav: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw std::invalid_argument("load_wav: not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  bool have_fmt = false;
  std::vector<double> samples;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    char id[5] = {0};
    std::memcpy(id, bytes.data() + pos, 4);
    std::uint32_t size = rd_u32(bytes.data() + pos + 4);
    size_t body = pos + 8;
    if (body + size > bytes.size())
      throw std::invalid_argument("load_wav: truncated chunk " + std::string(id));
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw std::invalid_argument("load_wav: short fmt chunk");
      format = rd_u16(bytes.data() + body);
      channels = rd_u16(bytes.data() + body + 2);
      bits = rd_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw std::invalid_argument("load_wav: data before fmt");
      if (channels != 1) throw std::invalid_argument("load_wav: mono input required");
      if (format == 1 && bits == 16) {
        size_t n = size / 2;
        samples.resize(n);
        for (size_t i = 0; i < n; ++i) {
          std::int16_t v = static_cast<std::int16_t>(rd_u16(bytes.data() + body + 2 * i));
          samples[i] = static_cast<double>(v) / 32768.0;
        }
      } else if (format == 3 && bits == 32) {
        size_t n = size / 4;
        samples.resize(n);
        for (size_t i = 0; i < n; ++i) {
          std::uint32_t raw = rd_u32(bytes.data() + body + 4 * i);
          float fv;
          std::memcpy(&fv, &raw, 4);
          samples[i] = static_cast<double>(fv);
        }
      } else {
        throw std::invalid_argument("load_wav: unsupported format (need PCM16 or float32)");
      }
    }
    pos = body + size + (size % 2);  // chunks are word-aligned
  }
  if (samples.empty()) throw std::invalid_argument("load_wav: no data chunk");

  Signal s;
  s.name = path;
  s.component_count = 0;
  s.components_per_time.assign(samples.size(), 0);
  s.inst_freq = RGrid(0, 0);
  s.samples.resize(samples.size());
  double energy = 0.0;
  for (double v : samples) energy += v * v;
  if (!(energy > 0.0)) throw std::invalid_argument("load_wav: zero-energy audio");
  double inv = 1.0 / std::sqrt(energy);
  for (size_t i = 0; i < samples.size(); ++i) s.samples[i] = samples[i] * inv;
  return s;
}

void write_wav(const std::string& path, const std::vector<double>& samples,
               int sample_rate, int bits) {
  if (bits != 16 && bits != 32)
    throw std::invalid_argument("write_wav: bits must be 16 or 32");
  std::uint16_t format = bits == 16 ? 1 : 3;
  std::uint32_t data_size = static_cast<std::uint32_t>(samples.size() * (bits / 8));

  std::vector<unsigned char> b;
  b.reserve(44 + data_size);
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  wr_u32(b, 36 + data_size);
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  wr_u32(b, 16);
  wr_u16(b, format);
  wr_u16(b, 1);  // mono
  wr_u32(b, static_cast<std::uint32_t>(sample_rate));
  wr_u32(b, static_cast<std::uint32_t>(sample_rate * (bits / 8)));
  wr_u16(b, static_cast<std::uint16_t>(bits / 8));
  wr_u16(b, static_cast<std::uint16_t>(bits));
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  wr_u32(b, data_size);
  for (double v : samples) {
    if (bits == 16) {
      double clamped = std::clamp(v, -1.0, 32767.0 / 32768.0);
      auto q = static_cast<std::int16_t>(std::lround(clamped * 32768.0));
      wr_u16(b, static_cast<std::uint16_t>(q));
    } else {
      float fv = static_cast<float>(v);
      std::uint32_t raw;
      std::memcpy(&raw, &fv, 4);
      wr_u32(b, raw);
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("write_wav: cannot open " + path);
  f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!f) throw std::runtime_error("write_wav: write failed for " + path);
}

}  // namespace tfz
