#include "sgi/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iterator>
#include <zlib.h>

#include "sgi/errors.hpp"

namespace sgi {

namespace {

constexpr char kMagic[8] = {'S', 'G', 'I', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr int kRecordDoubles = 20;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    v = to_le(v);
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    buf.insert(buf.end(), p, p + sizeof(T));
  }
  void bytes(const std::string& s) { buf.insert(buf.end(), s.begin(), s.end()); }
  std::vector<unsigned char> buf;
};

class Reader {
 public:
  Reader(const std::vector<unsigned char>& b, std::size_t end, const std::string& path)
      : buf_(b), end_(end), path_(path) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_le(v);
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) {
    if (n > end_ - pos_) throw IntegrityError("checkpoint " + path_ + " is truncated");
  }
  const std::vector<unsigned char>& buf_;
  std::size_t end_;
  std::size_t pos_ = 0;
  std::string path_;
};

void put_vec(Writer& w, const Eigen::Vector3d& v) {
  for (int i = 0; i < 3; ++i) w.put(v[i]);
}

Eigen::Vector3d get_vec(Reader& r) {
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v[i] = r.get<double>();
  return v;
}

std::uint32_t checksum(const unsigned char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  while (n > 0) {
    const uInt chunk = uInt(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return std::uint32_t(crc);
}

}  // namespace

void write_checkpoint(const std::string& path, const SpinorField& field, const CheckpointMeta& meta) {
  Writer w;
  w.bytes(std::string(kMagic, sizeof(kMagic)));
  w.put(kVersion);
  w.put(std::uint32_t(field.grid.dims()));
  for (int a = 0; a < 3; ++a) w.put(std::int32_t(field.grid.points(a)));
  for (int a = 0; a < 3; ++a) w.put(field.grid.extent(a));
  w.put(field.time);
  w.put(std::int64_t(meta.step));
  w.put(std::uint64_t(meta.run.size()));
  w.bytes(meta.run);
  w.put(std::uint64_t(meta.series.size()));
  for (const ObservableRecord& o : meta.series) {
    w.put(o.time);
    w.put(o.norm);
    put_vec(w, o.spin);
    w.put(o.coherence);
    put_vec(w, o.centroid_up);
    put_vec(w, o.centroid_down);
    w.put(o.dz);
    w.put(o.dy);
    put_vec(w, o.width_up);
    put_vec(w, o.width_down);
  }
  w.put(std::uint64_t(field.up.size()));
  w.buf.reserve(w.buf.size() + 32 * field.up.size() + 4);
  for (const Eigen::ArrayXcd* comp : {&field.up, &field.down}) {
    for (Eigen::Index i = 0; i < comp->size(); ++i) {
      w.put((*comp)[i].real());
      w.put((*comp)[i].imag());
    }
  }
  w.put(checksum(w.buf.data(), w.buf.size()));

  const std::string tmp = path + ".tmp";
  {
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out.write(reinterpret_cast<const char*>(w.buf.data()), std::streamsize(w.buf.size()));
    out.close();
    if (!out) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(fmt::format("cannot move {} to {}: {}", tmp, path, ec.message()));
}

Restored read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kMagic) + 8) throw IntegrityError("checkpoint " + path + " is truncated");
  if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw IntegrityError("checkpoint " + path + " has a bad magic number");
  }
  std::uint32_t stored;
  std::memcpy(&stored, buf.data() + buf.size() - 4, 4);
  stored = to_le(stored);
  const std::size_t body = buf.size() - 4;

  Reader r(buf, body, path);
  r.bytes(sizeof(kMagic));
  const std::uint32_t version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw IntegrityError(fmt::format("checkpoint {} has version {}, expected {}", path, version, kVersion));
  }
  if (checksum(buf.data(), body) != stored) {
    throw IntegrityError("checkpoint " + path + " failed its checksum (truncated or corrupted)");
  }
  const std::uint32_t dims = r.get<std::uint32_t>();
  std::array<int, 3> n;
  std::array<double, 3> ext;
  for (int a = 0; a < 3; ++a) n[a] = r.get<std::int32_t>();
  for (int a = 0; a < 3; ++a) ext[a] = r.get<double>();
  Grid grid;
  try {
    grid = dims == 1 ? Grid::line(n[2], ext[2]) : Grid::box(n, ext);
  } catch (const Error& e) {
    throw IntegrityError("checkpoint " + path + " holds an invalid grid: " + e.what());
  }
  Restored out;
  out.field = SpinorField(grid);
  out.field.time = r.get<double>();
  out.meta.step = long(r.get<std::int64_t>());
  out.meta.run = r.bytes(r.get<std::uint64_t>());
  const std::uint64_t records = r.get<std::uint64_t>();
  if (records > body / (8 * kRecordDoubles)) throw IntegrityError("checkpoint " + path + " is truncated");
  out.meta.series.resize(records);
  for (ObservableRecord& o : out.meta.series) {
    o.time = r.get<double>();
    o.norm = r.get<double>();
    o.spin = get_vec(r);
    o.coherence = r.get<double>();
    o.centroid_up = get_vec(r);
    o.centroid_down = get_vec(r);
    o.dz = r.get<double>();
    o.dy = r.get<double>();
    o.width_up = get_vec(r);
    o.width_down = get_vec(r);
  }
  const std::uint64_t count = r.get<std::uint64_t>();
  if (count != grid.size()) throw IntegrityError("checkpoint " + path + " amplitude count does not match its grid");
  for (Eigen::ArrayXcd* comp : {&out.field.up, &out.field.down}) {
    for (Eigen::Index i = 0; i < comp->size(); ++i) {
      const double re = r.get<double>();
      const double im = r.get<double>();
      (*comp)[i] = {re, im};
    }
  }
  if (r.pos() != body) throw IntegrityError("checkpoint " + path + " has trailing data");
  return out;
}

Restored read_checkpoint(const std::string& path, const Grid& expected) {
  Restored r = read_checkpoint(path);
  if (!(r.field.grid == expected)) {
    const Grid& g = r.field.grid;
    throw GridMismatchError(fmt::format(
        "checkpoint {} grid {}x{}x{} does not match the run grid {}x{}x{} (or extents differ)", path,
        g.points(0), g.points(1), g.points(2), expected.points(0), expected.points(1),
        expected.points(2)));
  }
  return r;
}

}  // namespace sgi
