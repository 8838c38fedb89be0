#include "mulab/idx.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <vector>

#include "mulab/errors.hpp"

namespace mulab {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("idx: cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_u32_be(const std::vector<unsigned char>& bytes, std::size_t offset, const std::string& path) {
    if (offset + 4 > bytes.size()) throw ParseError("idx: truncated header in " + path);
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

} // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const auto image_bytes = read_file(images_path);
    const std::uint32_t image_magic = read_u32_be(image_bytes, 0, images_path);
    if (image_magic != kImageMagic) {
        throw ParseError("idx: bad image magic in " + images_path + " (got " + std::to_string(image_magic) + ")");
    }
    const std::uint32_t count = read_u32_be(image_bytes, 4, images_path);
    const std::uint32_t rows = read_u32_be(image_bytes, 8, images_path);
    const std::uint32_t cols = read_u32_be(image_bytes, 12, images_path);
    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    if (image_bytes.size() != 16 + static_cast<std::size_t>(count) * pixels) {
        throw ParseError("idx: truncated image payload in " + images_path);
    }

    const auto label_bytes = read_file(labels_path);
    const std::uint32_t label_magic = read_u32_be(label_bytes, 0, labels_path);
    if (label_magic != kLabelMagic) {
        throw ParseError("idx: bad label magic in " + labels_path + " (got " + std::to_string(label_magic) + ")");
    }
    const std::uint32_t label_count = read_u32_be(label_bytes, 4, labels_path);
    if (label_bytes.size() != 8 + static_cast<std::size_t>(label_count)) {
        throw ParseError("idx: truncated label payload in " + labels_path);
    }
    if (label_count != count) {
        throw ParseError("idx: " + std::to_string(count) + " images but " + std::to_string(label_count) +
                         " labels");
    }

    Dataset out;
    out.features = Tensor(count, pixels);
    out.labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t p = 0; p < pixels; ++p) {
            out.features(i, p) = static_cast<double>(image_bytes[16 + i * pixels + p]) / 255.0;
        }
        out.labels[i] = static_cast<int>(label_bytes[8 + i]);
    }
    int max_label = -1;
    for (int label : out.labels) max_label = std::max(max_label, label);
    out.num_classes = max_label + 1;
    return out;
}

} // namespace mulab
