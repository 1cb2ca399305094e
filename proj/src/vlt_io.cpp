#include "vilt/vlt_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "VLT1 I/O assumes a little-endian host");

namespace vilt {

namespace fs = std::filesystem;

void write_vlt1(const fs::path& path, const Tensor& t) {
  std::string blob;
  blob.reserve(32 + t.size() * sizeof(double));
  blob += "VLT1 ";
  blob += std::to_string(t.shape().rank());
  for (std::size_t d : t.shape().dims) {
    blob += ' ';
    blob += std::to_string(d);
  }
  blob += '\n';
  const std::size_t header = blob.size();
  blob.resize(header + t.size() * sizeof(double));
  std::memcpy(blob.data() + header, t.data(), t.size() * sizeof(double));
  atomic_write(path, blob);
}

Tensor read_vlt1(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open tensor file: " + path.string());
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("truncated tensor file: " + path.string());
  }
  std::istringstream hs(header);
  std::string magic;
  std::size_t ndims = 0;
  hs >> magic >> ndims;
  if (magic != "VLT1" || !hs || ndims == 0) {
    throw std::runtime_error("not a VLT1 file: " + path.string());
  }
  std::vector<std::size_t> dims(ndims);
  for (auto& d : dims) {
    hs >> d;
    if (!hs || d == 0) {
      throw std::runtime_error("bad VLT1 header in " + path.string());
    }
  }
  Tensor t{Shape(std::move(dims))};
  in.read(reinterpret_cast<char*>(t.data()),
          static_cast<std::streamsize>(t.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(t.size() * sizeof(double))) {
    throw std::runtime_error("truncated tensor payload in " + path.string());
  }
  return t;
}

void atomic_write(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace vilt
