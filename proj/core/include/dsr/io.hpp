#ifndef DSR_IO_HPP
#define DSR_IO_HPP

#include <array>
#include <string>
#include <vector>

#include "dsr/classifier.hpp"
#include "dsr/geometry.hpp"

namespace dsr {

/// Number formatting shared by every CSV emitter: 6 significant digits,
/// '.' decimal separator ("%.6g").
std::string format_g6(double v);

/// Write header + rows as CSV with LF line endings (binary mode, so the bytes
/// are identical on every platform). Throws ValueError when rows is empty and
/// IoError when the path is unwritable.
void emit_csv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows);

/// The fixed label-map palette; a predicted label k renders as entry k mod 10.
const std::array<std::array<unsigned char, 3>, 10>& heatmap_palette();

/// Serialize a grid as three files:
///   <prefix>.ppm        P6 label map (palette above)
///   <prefix>.pgm        P5 margin map, min-max normalized to 0..255
///                       (degenerate range renders as 255)
///   <prefix>_range.csv  sidecar recording the margin min and max
void emit_heatmap(const PlaneGrid& grid, const std::string& prefix);

// ---------------------------------------------------------------------------
// Dataset container file
// ---------------------------------------------------------------------------
//
// Byte layout (integers and floats little-endian):
//   magic    8 bytes  "DSRDSET1"
//   version  u32      1
//   height   u32
//   width    u32
//   channels u32
//   classes  u32
//   count    u32
//   split    u32      0 = train, 1 = test
//   records  count x: f64[height*width*channels] values, u32 label

void save_dataset_file(const LabeledDataset& dataset, const std::string& path);
LabeledDataset load_dataset_file(const std::string& path);

} // namespace dsr

#endif // DSR_IO_HPP
