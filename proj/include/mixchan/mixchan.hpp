// Copyright 2026 The mixchan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef MIXCHAN_MIXCHAN_HPP
#define MIXCHAN_MIXCHAN_HPP

#include "mixchan/channels.hpp"
#include "mixchan/distinguish.hpp"
#include "mixchan/infoflow.hpp"
#include "mixchan/nonmarkov.hpp"
#include "mixchan/parallel.hpp"
#include "mixchan/qmath.hpp"
#include "mixchan/random.hpp"
#include "mixchan/scenario.hpp"
#include "mixchan/suites.hpp"

#endif  // MIXCHAN_MIXCHAN_HPP
