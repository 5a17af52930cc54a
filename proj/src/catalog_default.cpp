#include "fleetlog/catalog.hpp"

namespace fleetlog {

namespace {

// Shipped controlled vocabulary: 10 systems, 26 subsystems, 34 components,
// 142 (system, subsystem, component, activity) entries.
constexpr const char* kStandardCatalogCsv = R"(System,Subsystem,Component,Activity
Powertrain,Engine,Cylinder Head,Repair
Powertrain,Engine,Cylinder Head,Replace
Powertrain,Engine,Cylinder Head,Inspect
Powertrain,Engine,Cylinder Head,Overhaul
Powertrain,Engine,Timing Belt,Replace
Powertrain,Engine,Timing Belt,Inspect
Powertrain,Engine,Timing Belt,Adjust
Powertrain,Transmission,Gearbox,Repair
Powertrain,Transmission,Gearbox,Replace
Powertrain,Transmission,Gearbox,Inspect
Powertrain,Transmission,Gearbox,Overhaul
Powertrain,Transmission,Gearbox,Lubricate
Powertrain,Transmission,Clutch,Replace
Powertrain,Transmission,Clutch,Adjust
Powertrain,Transmission,Clutch,Inspect
Powertrain,Transmission,Clutch,Repair
Powertrain,Drivetrain,Drive Shaft,Replace
Powertrain,Drivetrain,Drive Shaft,Inspect
Powertrain,Drivetrain,Drive Shaft,Lubricate
Powertrain,Drivetrain,Drive Shaft,Align
Brake System,Hydraulic Brake,Brake Pads,Replace
Brake System,Hydraulic Brake,Brake Pads,Inspect
Brake System,Hydraulic Brake,Brake Pads,Clean
Brake System,Hydraulic Brake,Brake Pads,Adjust
Brake System,Hydraulic Brake,Brake Caliper,Replace
Brake System,Hydraulic Brake,Brake Caliper,Repair
Brake System,Hydraulic Brake,Brake Caliper,Clean
Brake System,Hydraulic Brake,Brake Caliper,Lubricate
Brake System,Hydraulic Brake,Brake Caliper,Inspect
Brake System,Parking Brake,Parking Brake Cable,Replace
Brake System,Parking Brake,Parking Brake Cable,Adjust
Brake System,Parking Brake,Parking Brake Cable,Lubricate
Brake System,Parking Brake,Parking Brake Cable,Inspect
Brake System,Brake Control,ABS Module,Replace
Brake System,Brake Control,ABS Module,Calibrate
Brake System,Brake Control,ABS Module,Inspect
Brake System,Brake Control,ABS Module,Repair
HVAC,Air Conditioning,Compressor,Repair
HVAC,Air Conditioning,Compressor,Replace
HVAC,Air Conditioning,Compressor,Recharge
HVAC,Air Conditioning,Compressor,Inspect
HVAC,Air Conditioning,Condenser,Repair
HVAC,Air Conditioning,Condenser,Replace
HVAC,Air Conditioning,Condenser,Clean
HVAC,Air Conditioning,Condenser,Inspect
HVAC,Cooling,Coolant Pump,Replace
HVAC,Cooling,Coolant Pump,Repair
HVAC,Cooling,Coolant Pump,Inspect
HVAC,Cooling,Coolant Pump,Seal
HVAC,Cooling,Radiator,Replace
HVAC,Cooling,Radiator,Clean
HVAC,Cooling,Radiator,Flush
HVAC,Cooling,Radiator,Repair
HVAC,Cooling,Radiator,Inspect
HVAC,Ventilation,Blower Motor,Replace
HVAC,Ventilation,Blower Motor,Repair
HVAC,Ventilation,Blower Motor,Clean
HVAC,Ventilation,Blower Motor,Lubricate
Steering,Rack and Pinion,Steering Rack,Replace
Steering,Rack and Pinion,Steering Rack,Repair
Steering,Rack and Pinion,Steering Rack,Align
Steering,Rack and Pinion,Steering Rack,Inspect
Steering,Rack and Pinion,Steering Rack,Lubricate
Steering,Power Steering,Power Steering Pump,Replace
Steering,Power Steering,Power Steering Pump,Repair
Steering,Power Steering,Power Steering Pump,Flush
Steering,Power Steering,Power Steering Pump,Inspect
Suspension,Front Axle,Shock Absorber,Replace
Suspension,Front Axle,Shock Absorber,Inspect
Suspension,Front Axle,Shock Absorber,Adjust
Suspension,Front Axle,Control Arm,Replace
Suspension,Front Axle,Control Arm,Inspect
Suspension,Front Axle,Control Arm,Align
Suspension,Front Axle,Control Arm,Tighten
Suspension,Rear Axle,Leaf Spring,Replace
Suspension,Rear Axle,Leaf Spring,Inspect
Suspension,Rear Axle,Leaf Spring,Lubricate
Suspension,Rear Axle,Leaf Spring,Repair
Suspension,Wheel End,Wheel Bearing,Replace
Suspension,Wheel End,Wheel Bearing,Lubricate
Suspension,Wheel End,Wheel Bearing,Inspect
Suspension,Wheel End,Wheel Bearing,Adjust
Electrical,Charging System,Alternator,Replace
Electrical,Charging System,Alternator,Repair
Electrical,Charging System,Alternator,Inspect
Electrical,Charging System,Alternator,Clean
Electrical,Charging System,Battery,Replace
Electrical,Charging System,Battery,Recharge
Electrical,Charging System,Battery,Inspect
Electrical,Charging System,Battery,Clean
Electrical,Charging System,Battery,Tighten
Electrical,Starting System,Starter Motor,Replace
Electrical,Starting System,Starter Motor,Repair
Electrical,Starting System,Starter Motor,Inspect
Electrical,Starting System,Starter Motor,Clean
Electrical,Lighting,Headlight Assembly,Replace
Electrical,Lighting,Headlight Assembly,Adjust
Electrical,Lighting,Headlight Assembly,Align
Electrical,Lighting,Headlight Assembly,Clean
Electrical,Lighting,Headlight Assembly,Seal
Fuel System,Fuel Delivery,Fuel Pump,Replace
Fuel System,Fuel Delivery,Fuel Pump,Repair
Fuel System,Fuel Delivery,Fuel Pump,Inspect
Fuel System,Fuel Delivery,Fuel Pump,Clean
Fuel System,Fuel Delivery,Fuel Filter,Replace
Fuel System,Fuel Delivery,Fuel Filter,Inspect
Fuel System,Fuel Delivery,Fuel Filter,Clean
Fuel System,Fuel Injection,Fuel Injector,Replace
Fuel System,Fuel Injection,Fuel Injector,Clean
Fuel System,Fuel Injection,Fuel Injector,Calibrate
Fuel System,Fuel Injection,Fuel Injector,Inspect
Fuel System,Fuel Injection,Fuel Injector,Repair
Fuel System,Fuel Storage,Fuel Tank,Replace
Fuel System,Fuel Storage,Fuel Tank,Clean
Fuel System,Fuel Storage,Fuel Tank,Seal
Fuel System,Fuel Storage,Fuel Tank,Inspect
Fuel System,Fuel Storage,Fuel Tank,Repair
Exhaust System,Exhaust Line,Muffler,Replace
Exhaust System,Exhaust Line,Muffler,Repair
Exhaust System,Exhaust Line,Muffler,Inspect
Exhaust System,Exhaust Line,Muffler,Seal
Exhaust System,Exhaust Line,Muffler,Tighten
Exhaust System,Emission Control,Catalytic Converter,Replace
Exhaust System,Emission Control,Catalytic Converter,Inspect
Exhaust System,Emission Control,Catalytic Converter,Clean
Chassis,Frame,Crossmember,Inspect
Chassis,Frame,Crossmember,Repair
Chassis,Frame,Crossmember,Seal
Chassis,Frame,Crossmember,Tighten
Chassis,Body Mounts,Body Mount Bushing,Replace
Chassis,Body Mounts,Body Mount Bushing,Inspect
Chassis,Body Mounts,Body Mount Bushing,Tighten
Chassis,Body Mounts,Body Mount Bushing,Lubricate
Safety Systems,Restraint System,Seat Belt Retractor,Replace
Safety Systems,Restraint System,Seat Belt Retractor,Inspect
Safety Systems,Restraint System,Seat Belt Retractor,Clean
Safety Systems,Restraint System,Seat Belt Retractor,Repair
Safety Systems,Driver Assistance,Backup Camera,Replace
Safety Systems,Driver Assistance,Backup Camera,Calibrate
Safety Systems,Driver Assistance,Backup Camera,Clean
Safety Systems,Driver Assistance,Backup Camera,Inspect
Safety Systems,Driver Assistance,Backup Camera,Adjust
)";

}  // namespace

const Catalog& Catalog::standard() {
  static const Catalog instance =
      Catalog::from_csv(csv::read_string(kStandardCatalogCsv));
  return instance;
}

}  // namespace fleetlog
