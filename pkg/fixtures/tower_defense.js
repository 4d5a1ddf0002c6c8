// Lane defense: enemies march, turrets volley, gold buys reinforcements.
var enemyWave = [];
var turrets = [{lane: 0, power: 2, cool: 0}, {lane: 1, power: 3, cool: 0}];
var gold = 20;
var baseHp = 40;
var waveNumber = 1;
var kills = 0;

function spawnEnemy(lane, hp) {
  return {lane: lane, pos: 120, hp: hp, speed: 1 + lane % 2};
}

function nextWave() {
  var n = 2 + waveNumber;
  var i = 0;
  while (i < n) {
    enemyWave.push(spawnEnemy(i % 3, 4 + waveNumber * 2));
    i = i + 1;
  }
  waveNumber = waveNumber + 1;
}

function fireTurrets() {
  var t = 0;
  while (t < turrets.length) {
    var tur = turrets[t];
    if (tur.cool > 0) {
      tur.cool = tur.cool - 1;
    } else {
      var e = 0;
      while (e < enemyWave.length) {
        var foe = enemyWave[e];
        if (foe.lane === tur.lane && foe.pos < 100) {
          foe.hp = foe.hp - tur.power;
          tur.cool = 3;
          break;
        }
        e = e + 1;
      }
    }
    t = t + 1;
  }
}

function marchEnemies() {
  var i = 0;
  while (i < enemyWave.length) {
    var foe = enemyWave[i];
    foe.pos = foe.pos - foe.speed;
    if (foe.hp <= 0) {
      kills = kills + 1;
      gold = gold + 3;
      enemyWave.splice(i, 1);
      continue;
    }
    if (foe.pos <= 0) {
      baseHp = baseHp - foe.hp;
      enemyWave.splice(i, 1);
      continue;
    }
    i = i + 1;
  }
}

function buyTurret(x, y) {
  if (gold >= 15) {
    gold = gold - 15;
    turrets.push({lane: turrets.length % 3, power: 2 + waveNumber % 3, cool: 0});
    console.log("turret deployed", turrets.length);
  }
}

function tickDefense(t) {
  if (enemyWave.length === 0) { nextWave(); }
  fireTurrets();
  marchEnemies();
  if (baseHp <= 0) {
    console.log("base fell on wave", waveNumber);
    baseHp = 40;
    gold = 20;
    waveNumber = 1;
  }
  commitState({gold: gold, hp: baseHp, wave: waveNumber, kills: kills});
}

registerTap(buyTurret);
registerTick(tickDefense);
console.log("defense online");
