// Lane racer: dodge traffic, fuel drains, drafting builds boost.
var playerLane = 1;
var traffic = [];
var fuel = 100;
var distance = 0;
var boost = 0;
var crashes = 0;

function spawnCar(t) {
  return {lane: (t * 7) % 3, pos: 140, speed: 2 + (t % 3)};
}

function moveTraffic() {
  var i = 0;
  while (i < traffic.length) {
    var car = traffic[i];
    car.pos = car.pos - car.speed;
    if (car.pos < -10) {
      traffic.splice(i, 1);
      distance = distance + 5;
      continue;
    }
    i = i + 1;
  }
}

function checkCollisions() {
  var i = 0;
  while (i < traffic.length) {
    var car = traffic[i];
    if (car.lane === playerLane && car.pos > 8 && car.pos < 22) {
      crashes = crashes + 1;
      fuel = fuel - 18;
      traffic.splice(i, 1);
      boost = 0;
      continue;
    }
    if (car.lane === playerLane && car.pos >= 22 && car.pos < 40) {
      boost = boost + 1;
    }
    i = i + 1;
  }
}

function switchLane(x, y) {
  if (x < 64) {
    playerLane = playerLane - 1;
  } else {
    playerLane = playerLane + 1;
  }
  if (playerLane < 0) { playerLane = 0; }
  if (playerLane > 2) { playerLane = 2; }
}

function burnFuel(t) {
  var burn = 0.2 + boost * 0.05;
  fuel = fuel - burn;
  if (t % 50 === 0) { fuel = fuel + 12; }
  if (fuel > 100) { fuel = 100; }
  if (fuel <= 0) {
    console.log("out of fuel at", distance);
    fuel = 60;
    boost = 0;
    distance = distance - 20;
  }
}

function tickRace(t) {
  if (t % 9 === 0) {
    traffic.push(spawnCar(t));
  }
  moveTraffic();
  checkCollisions();
  burnFuel(t);
  distance = distance + 1 + Math.floor(boost / 4);
  commitState({dist: distance, fuel: Math.floor(fuel), lane: playerLane, crashes: crashes});
}

registerTap(switchLane);
registerTick(tickRace);
console.log("engines hot");
