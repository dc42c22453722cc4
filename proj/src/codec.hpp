/*
 * Copyright 2026 The imbal Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef IMBAL_SRC_CODEC_HPP_
#define IMBAL_SRC_CODEC_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace imbal::codec {

// Base64 of little-endian IEEE-754 doubles / int32 values.
std::string EncodeDoubles(const std::vector<double>& values);
std::vector<double> DecodeDoubles(const std::string& text);
std::string EncodeInts(const std::vector<int32_t>& values);
std::vector<int32_t> DecodeInts(const std::string& text);

}  // namespace imbal::codec

#endif  // IMBAL_SRC_CODEC_HPP_
