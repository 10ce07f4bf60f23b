#ifndef PFLOW_RENDER_H_
#define PFLOW_RENDER_H_

#include <string>
#include <string_view>

#include "pflow/grid.h"
#include "pflow/tensor.h"

namespace pflow {

enum class FrameFormat { kAscii, kPixmap };

FrameFormat parse_format(std::string_view name);
const char* format_extension(FrameFormat f);

// ASCII legend, one glyph per cell:
//   '#' obstacle           ' ' no mass
//   '+' uniform actions    '·' (U+00B7) argmax is still
//   '^' up   'u' up-right   '>' right   'n' down-right
//   'v' down 'b' down-left  '<' left    'p' up-left
// Rows end with '\n'. Ties resolve to the lowest action index.
std::string render_ascii(const MessageTensor& tensor, const GridMap& map);
// Marginals have no action axis: 'o' marks a cell with mass.
std::string render_ascii(const StateMarginal& marginal, const GridMap& map);

// Binary P6 pixmap, one pixel per cell. Free cells are (0, 0, b) with b the
// state marginal scaled by the frame maximum; obstacles are grey.
std::string render_pixmap(const MessageTensor& tensor, const GridMap& map);
std::string render_pixmap(const StateMarginal& marginal, const GridMap& map);

std::string render_frame(const MessageTensor& tensor, const GridMap& map, FrameFormat format);
std::string render_frame(const StateMarginal& marginal, const GridMap& map, FrameFormat format);

// Glyph for one action (arrows and the still dot).
std::string_view action_glyph(Action a);

}  // namespace pflow

#endif  // PFLOW_RENDER_H_
