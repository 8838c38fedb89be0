#pragma once

#include <string>

#include "mulab/dataset.hpp"

namespace mulab {

/// Loads an IDX image/label file pair (big-endian headers, magic 0x00000803
/// for images and 0x00000801 for labels, unsigned byte payloads). Images are
/// flattened row-major and scaled by 1/255; num_classes is max label + 1.
/// Throws ParseError on bad magic, truncation, or image/label count mismatch.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

} // namespace mulab
