#pragma once

#include <string>

#include "corf/types.hpp"

namespace corf {

/// Loads an 8-bit PNG or binary PGM (P5) as a grayscale image in [0, 1].
/// RGB(A) PNG input is reduced with luma weights 0.299/0.587/0.114.
Image load_grayscale(const std::string& path);

/// Writes values clamped to [0,1], scaled by 255 and rounded half up.
/// Format chosen from the extension: .png or .pgm.
void save_grayscale(const std::string& path, const PlaneD& values);
inline void save_grayscale(const std::string& path, const Image& image) {
  save_grayscale(path, image.values);
}

}  // namespace corf
