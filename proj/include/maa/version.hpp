// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 maa contributors

#pragma once

namespace maa {

inline constexpr const char* version_string = "1.0.0";

}  // namespace maa
