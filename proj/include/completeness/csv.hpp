#pragma once

#include <string>

#include "completeness/core.hpp"

namespace completeness {

// CSV schemas (headers mandatory, UTF-8, '.' decimal separator):
//   risk       lottery_id,z1,z2,p,ce,subject_id
//   games      game_id,r11..r33,c11..c33,action,subject_id  (action in 1..3)
//   sequences  subject_id,round,flips                       (flips: 8 x H/T)
// Schema violations raise Error(Schema) naming the row and column.

Dataset load_dataset_csv(const std::string& path, ProblemKind kind);
void save_dataset_csv(const Dataset& data, const std::string& path);

std::string dataset_to_csv(const Dataset& data);
Dataset dataset_from_csv(const std::string& text, ProblemKind kind);

}  // namespace completeness
