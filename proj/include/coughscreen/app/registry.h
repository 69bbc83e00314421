/*
 * Copyright 2026 The Coughscreen Authors.
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

#ifndef COUGHSCREEN_APP_REGISTRY_H_
#define COUGHSCREEN_APP_REGISTRY_H_

#include <memory>

#include "coughscreen/app/config.h"
#include "coughscreen/screening/pipeline.h"

namespace coughscreen::app {

// Loads every configured model. Optional models left unset in the config
// stay empty in the registry.
std::shared_ptr<const screening::ModelRegistry> BuildRegistry(const ServiceConfig& config);

screening::PipelineOptions PipelineOptionsFrom(const ServiceConfig& config);

}  // namespace coughscreen::app

#endif  // COUGHSCREEN_APP_REGISTRY_H_
