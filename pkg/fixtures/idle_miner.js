// Idle mine: drills tick out coins, upgrades compound, prestige resets.
var coins = 0;
var drills = [{rate: 1, level: 1}];
var upgradeCost = 10;
var prestige = 0;
var lifetime = 0;

function mineOnce() {
  var total = 0;
  var i = 0;
  while (i < drills.length) {
    var d = drills[i];
    total = total + d.rate * d.level;
    i = i + 1;
  }
  return total;
}

function tryUpgrade(x, y) {
  if (coins >= upgradeCost) {
    coins = coins - upgradeCost;
    var target = drills[drills.length - 1];
    target.level = target.level + 1;
    upgradeCost = Math.floor(upgradeCost * 1.6) + 2;
    if (target.level % 4 === 0) {
      drills.push({rate: 1 + drills.length, level: 1});
      console.log("new drill", drills.length);
    }
  }
}

function maybePrestige() {
  if (coins > 400 * (prestige + 1)) {
    prestige = prestige + 1;
    coins = 0;
    drills = [{rate: 1 + prestige, level: 1}];
    upgradeCost = 10;
    console.log("prestige", prestige);
  }
}

function payoutBonus(t) {
  if (t % 40 === 0 && t > 0) {
    var bonus = 5 + (t % 7) + prestige * 3;
    return bonus;
  }
  return 0;
}

function tickMine(t) {
  var dug = mineOnce();
  coins = coins + dug + payoutBonus(t);
  lifetime = lifetime + dug;
  maybePrestige();
  commitState({coins: coins, drills: drills.length, prestige: prestige, lifetime: lifetime});
}

registerTap(tryUpgrade);
registerTick(tickMine);
console.log("mine shaft open");
